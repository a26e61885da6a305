#!/usr/bin/env python3
"""Run the acceptance criteria and print one line per criterion.

Usage: python scripts/run_acceptance.py [A1,A2,...]
Exit code 2 if any criterion fails.
"""

import sys

from cfstats import acceptance


def main() -> int:
    names = sys.argv[1].split(",") if len(sys.argv) > 1 else None
    results = acceptance.run_all(names)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 2


if __name__ == "__main__":
    sys.exit(main())
