"""Exact enumeration of finite rational trajectories.

Integer-arithmetic digit algorithms (Euclid, Brun GCD, Jacobi-Perron)
and exhaustive enumeration of all coprime points below a weight or
denominator bound.  Every emitted record carries the canonical digit
string produced by the forward integer algorithm, so each point appears
exactly once and composing the inverse branches at the base point
reproduces it exactly.

Conventions for degenerate inputs: p = 0 (Gauss), xi = 0 (JP) and
tuples containing zeros (Brun) are terminal-or-skipped states and never
enumerated.  A small family of Jacobi-Perron boundary points (for
example (v/u, 0) with v >= 2, and most points with a coordinate equal
to 1 or on the diagonal) admits no admissible expansion ending in
b >= 2; jp_digits raises NotExpandableError for those and the
enumeration skips them.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .maps import (
    BrunDigit,
    GaussDigit,
    JPDigit,
    MapDescriptor,
    compose_string,
)


class NotExpandableError(ValueError):
    """The point has no admissible digit string reaching the base point."""


class BudgetError(RuntimeError):
    """The implied denominator bound exceeds the configured resource budget."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, slots=True)
class RationalPoint:
    """Exact point (n_1/q, ..., n_m/q) with gcd(n_1, ..., n_m, q) = 1."""

    numerators: tuple
    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if any(n < 0 or n > self.denominator for n in self.numerators):
            raise ValueError("numerators must lie in [0, denominator]")
        if math.gcd(*self.numerators, self.denominator) != 1:
            raise ValueError("point is not in lowest terms")

    def coords(self) -> tuple:
        return tuple(Fraction(n, self.denominator) for n in self.numerators)


@dataclass(frozen=True)
class TrajectoryRecord:
    """A point of the trajectory space with its canonical expansion."""

    point: RationalPoint
    digits: tuple
    weight_multiplier: int
    counts: Counter = field(compare=False)

    @property
    def depth(self) -> int:
        return len(self.digits)

    @property
    def weight(self) -> float:
        return self.weight_multiplier * math.log(self.point.denominator)

    @property
    def weight_exact(self) -> tuple:
        """(c, q) with w = c * log q exactly."""
        return (self.weight_multiplier, self.point.denominator)


# ---------------------------------------------------------------------------
# integer digit algorithms


def euclid_digits(p: int, q: int) -> list:
    """Continued fraction digits of p/q with the last quotient >= 2.

    The terminal convention holds automatically: the Gauss orbit of a
    rational in (0, 1) never passes through 1, so the final exact
    quotient is at least 2.
    """
    if not (0 < p < q):
        raise ValueError(f"need 0 < p < q, got ({p}, {q})")
    if math.gcd(p, q) != 1:
        raise ValueError(f"({p}, {q}) is not coprime")
    digits = []
    while p:
        j, r = divmod(q, p)
        digits.append(GaussDigit(j))
        p, q = r, p
    return digits


def brun_gcd_digits(t: Sequence[int], m: int | None = None):
    """Brun GCD digits of a nonnegative integer tuple.

    Repeatedly divides the largest entry by the second largest,
    recording a_i = floor(largest / second largest) >= 1, until only the
    leading entry is nonzero.  Returns (digits, gcd).  The j sequence
    equals the digit labels of the Brun map orbit of the projective
    point; max positions are tracked separately by the enumeration.
    """
    t = sorted((int(v) for v in t), reverse=True)
    if m is not None and len(t) != m + 1:
        raise ValueError("tuple length must be m + 1")
    if t[-1] < 0:
        raise ValueError("entries must be nonnegative")
    if t[0] == 0:
        raise ValueError("all-zero input")
    digits = []
    while t[1] != 0:
        a = t[0] // t[1]
        digits.append(a)
        t[0] -= a * t[1]
        t.sort(reverse=True)
    return digits, t[0]


def brun_trajectory_digits(t: Sequence[int]) -> list:
    """Digit string (with max positions) of the Brun map orbit of a tuple.

    The input (t_1, ..., t_{m+1}) must be coprime, all entries positive,
    sorted descending; it corresponds to the point
    (t_2/t_1, ..., t_{m+1}/t_1).  Ties take the smallest index.
    """
    t = tuple(int(v) for v in t)
    if any(t[k] < t[k + 1] for k in range(len(t) - 1)):
        raise ValueError("tuple must be sorted descending")
    if t[-1] < 1:
        raise ValueError("entries must be positive")
    if math.gcd(*t) != 1:
        raise ValueError("tuple is not coprime")
    q, u = t[0], list(t[1:])
    m = len(u)
    digits = []
    while any(u):
        i = max(range(m), key=lambda k: (u[k], -k))
        j = q // u[i]
        digits.append(BrunDigit(i + 1, j))
        q, u = u[i], u[i + 1 :] + [q - j * u[i]] + u[:i]
    return digits


# The four digit choices at a JP state (p, r, q) ~ (p/q, r/q), preferred
# in this order.  Floor choices reproduce the raw forward map; the
# boundary variants (exact quotient minus one) realize the closure of a
# neighbouring cell and are needed for a null family of rationals whose
# floor orbit stalls at (0, eta) with eta != 0.
def _jp_children(p: int, r: int, q: int):
    af, bf = r // p, q // p
    a_opts = [af] if r % p or af == 0 else [af, af - 1]
    b_opts = [bf] if q % p or bf == 1 else [bf, bf - 1]
    for a in a_opts:
        for b in b_opts:
            if a <= b and b >= 1:
                yield a, b


def jp_digits(p: int, r: int, q: int, max_depth: int = 10_000) -> list:
    """Canonical Jacobi-Perron digit string of (p/q, r/q).

    Depth-first search preferring the floor digits at every state, with
    boundary fallbacks explored in a fixed order; the first admissible
    string that reaches (0, 0) with final b >= 2 is returned.  Raises
    NotExpandableError when no admissible expansion exists (possible
    only for boundary and diagonal points).
    """
    if q < 1 or not (0 < p <= q) or not (0 <= r <= q):
        raise ValueError(f"need 1 <= p <= q and 0 <= r <= q, got ({p}, {r}, {q})")
    if math.gcd(p, math.gcd(r, q)) != 1:
        raise ValueError(f"({p}, {r}, {q}) is not coprime")

    # stack entries: (state, child iterator); digits grows with the stack
    digits: list[JPDigit] = []
    stack = [((p, r, q), _jp_children(p, r, q))]
    steps = 0
    while stack:
        steps += 1
        if steps > max_depth * 4:
            raise RuntimeError("search budget exceeded")
        (sp, sr, sq), children = stack[-1]
        advanced = False
        for a, b in children:
            if digits and digits[-1].diagonal and a == 0:
                continue
            np_, nr = sr - a * sp, sq - b * sp
            if np_ == 0:
                if nr == 0 and b >= 2:
                    digits.append(JPDigit(a, b))
                    return digits
                continue
            digits.append(JPDigit(a, b))
            stack.append(((np_, nr, sp), _jp_children(np_, nr, sp)))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if digits and stack:
                digits.pop()
    raise NotExpandableError(f"({p}, {r}, {q}) has no admissible expansion")


def jp_digits_floor_path(p: int, r: int, q: int):
    """Raw floor recursion digits; returns (digits, clean) without search."""
    digits = []
    while p:
        a, b = r // p, q // p  # a <= b since r <= q
        digits.append(JPDigit(a, b))
        p, r, q = r - a * p, q - b * p, p
        if p == 0 and r != 0:
            return digits, False
    return digits, True


# ---------------------------------------------------------------------------
# enumeration


def _gauss_records(bound: int) -> Iterator[TrajectoryRecord]:
    for q in range(2, bound + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                digits = tuple(euclid_digits(p, q))
                yield TrajectoryRecord(
                    RationalPoint((p,), q), digits, 2, Counter(d.label for d in digits)
                )


def _jp_records(bound: int) -> Iterator[TrajectoryRecord]:
    for q in range(2, bound + 1):
        for p in range(1, q + 1):
            for r in range(0, q + 1):
                if math.gcd(p, math.gcd(r, q)) != 1:
                    continue
                try:
                    digits = tuple(jp_digits(p, r, q))
                except NotExpandableError:
                    continue
                yield TrajectoryRecord(
                    RationalPoint((p, r), q), digits, 3, Counter(d.label for d in digits)
                )


def _brun_records(bound: int, m: int) -> Iterator[TrajectoryRecord]:
    def desc_tuples(prefix, remaining, cap):
        if remaining == 0:
            yield prefix
            return
        for v in range(cap, 0, -1):
            yield from desc_tuples(prefix + (v,), remaining - 1, v)

    for t1 in range(1, bound + 1):
        for rest in desc_tuples((), m, t1):
            t = (t1,) + rest
            if math.gcd(*t) != 1:
                continue
            digits = tuple(brun_trajectory_digits(t))
            yield TrajectoryRecord(
                RationalPoint(rest, t1), digits, m + 1, Counter(d.label for d in digits)
            )


def denominator_bound(map_desc: MapDescriptor, Q: float) -> int:
    """Largest denominator with weight (m+1) log q strictly below Q."""
    c = map_desc.weight_multiplier
    n = int(math.floor(math.exp(Q / c)))
    while c * math.log(n) >= Q:
        n -= 1
    while c * math.log(n + 1) < Q:
        n += 1
    return n


def enumerate_trajectories(
    map_desc: MapDescriptor,
    Q: float | None = None,
    denominator_cap: int | None = None,
    budget: int = 5_000_000,
) -> Iterator[TrajectoryRecord]:
    """Stream every coprime trajectory point below the bound, exactly once.

    Exactly one of Q (strict weight bound w < Q) and denominator_cap
    (q <= cap) must be given.  Order is deterministic: by denominator,
    then lexicographic numerators (Brun numerators descending within a
    denominator by construction).
    """
    if (Q is None) == (denominator_cap is None):
        raise ValueError("specify exactly one of Q and denominator_cap")
    bound = denominator_cap if denominator_cap is not None else denominator_bound(map_desc, Q)
    if bound > budget:
        raise BudgetError(f"denominator bound {bound} exceeds budget {budget}")
    if map_desc.algorithm == "gauss":
        yield from _gauss_records(bound)
    elif map_desc.algorithm == "jp":
        yield from _jp_records(bound)
    else:
        yield from _brun_records(bound, map_desc.m)


def verify_roundtrip(map_desc: MapDescriptor, record: TrajectoryRecord) -> bool:
    """Exact check that the record's digits recompose to its point."""
    h = compose_string(map_desc, record.digits)
    image = h.apply_to_origin()
    return image == record.point.coords() and h.corner_denominator() == record.point.denominator
