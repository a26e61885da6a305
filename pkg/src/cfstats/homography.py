"""Unimodular integer homographies acting projectively on [0,1]^m.

A homography is an (m+1)x(m+1) integer matrix M acting on x in R^m by

    y_k = (row_k . (x, 1)) / (row_{m+1} . (x, 1)),   k = 1..m.

Matrix product corresponds to composition of the projective actions, and
for |det M| = 1 the Jacobian determinant of the action is

    |J(x)| = 1 / den(x)^{m+1},   den(x) = row_{m+1} . (x, 1).

All inverse branches of the maps in this package are unimodular, so the
weight of a composed branch at the base point is (m+1) * log(den).
Entries are Python ints, so composition and evaluation on Fractions are
exact at any depth.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


class Homography:
    """Integer projective-linear map with exact arithmetic."""

    __slots__ = ("rows", "m")

    def __init__(self, rows: Sequence[Sequence[int]]):
        n = len(rows)
        if n < 2 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square of size >= 2")
        self.rows = tuple(tuple(int(v) for v in r) for r in rows)
        self.m = n - 1

    @classmethod
    def identity(cls, m: int) -> "Homography":
        n = m + 1
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Homography) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Homography({list(map(list, self.rows))})"

    def compose(self, other: "Homography") -> "Homography":
        """Matrix product self @ other; acts as self after other."""
        if self.m != other.m:
            raise ValueError("dimension mismatch")
        n = self.m + 1
        ot = tuple(zip(*other.rows))
        return Homography(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                for row in self.rows
            )
        )

    def __matmul__(self, other: "Homography") -> "Homography":
        return self.compose(other)

    def det(self) -> int:
        return _int_det([list(r) for r in self.rows])

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def denominator_at(self, x: Sequence) -> object:
        """row_{m+1} . (x, 1); exact if x has Fraction coordinates."""
        last = self.rows[-1]
        return sum(c * v for c, v in zip(last, x)) + last[-1]

    def apply(self, x: Sequence):
        """Projective action on a point of R^m (floats or Fractions)."""
        if len(x) != self.m:
            raise ValueError("point dimension mismatch")
        den = self.denominator_at(x)
        if den <= 0:
            raise ValueError("point outside branch domain (denominator <= 0)")
        out = []
        for row in self.rows[:-1]:
            num = sum(c * v for c, v in zip(row, x)) + row[-1]
            if isinstance(den, (int, Fraction)) and not isinstance(num, float):
                out.append(Fraction(num, den) if not isinstance(num, Fraction) else num / den)
            else:
                out.append(num / den)
        return tuple(out)

    def apply_to_origin(self) -> tuple:
        """Image of the zero vector: last column over the corner entry."""
        q = self.rows[-1][-1]
        if q <= 0:
            raise ValueError("origin outside branch domain")
        return tuple(Fraction(row[-1], q) for row in self.rows[:-1])

    def corner_denominator(self) -> int:
        """Bottom-right entry, the exact denominator of apply_to_origin()."""
        return self.rows[-1][-1]

    def log_jacobian(self, x: Sequence) -> float:
        """log |J(x)| = log|det| - (m+1) log den(x)."""
        den = self.denominator_at(x)
        if den <= 0:
            raise ValueError("point outside branch domain (denominator <= 0)")
        d = abs(self.det())
        return math.log(d) - (self.m + 1) * math.log(den)

    def weight_at(self, x: Sequence) -> float:
        """-log |J(x)|, the weight carried by this branch at x."""
        return -self.log_jacobian(x)


def _int_det(a: list) -> int:
    """Fraction-free Gaussian elimination (Bareiss); exact for int matrices."""
    n = len(a)
    a = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]
