"""Vectorized ensemble sweeps over denominator-partitioned blocks.

These builders produce the same per-point digit counts as the record
generators in orbits.py, but run the integer recursions simultaneously
over numpy lanes, block by block in denominator order.  A block is an
independent pure computation, so blocks can be dispatched to a process
pool; results are merged in fixed block order and all reductions are
integer-exact, which makes every output bit-identical regardless of the
worker count.

Each sweep returns an EnsembleTable, the lossless sufficient statistic
(q, digit-count vector) -> multiplicity for the chosen targets.  The
verifying variants additionally recompose every trajectory's homography
with exact integer column recursions, check the round trip against the
point, and accumulate forward log-Jacobians against the closed-form
weight.  Entries stay far below 2^63 for the bounds used here; a guard
asserts that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .orbits import jp_digits, NotExpandableError
from .stats import EnsembleTable

_COUNT_CAP = 64  # per-target digit counts must stay below this per trajectory


@dataclass
class VerifyReport:
    checked: int
    roundtrip_failures: int
    max_weight_error: float
    max_matrix_entry: int

    @property
    def ok(self) -> bool:
        return self.roundtrip_failures == 0 and self.max_matrix_entry < 2**62


def totient_sum(n: int) -> int:
    """Sum of Euler's totient over 2..n (independent sieve oracle)."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return int(phi[2:].sum())


def _blocks(lo: int, hi: int, budget: int):
    """Split denominators [lo, hi] into ranges of roughly `budget` lanes,
    assuming ~q lanes per denominator (q^2 for the triple sweeps)."""
    out = []
    start = lo
    acc = 0
    for q in range(lo, hi + 1):
        acc += max(q, 1)
        if acc >= budget:
            out.append((start, q))
            start, acc = q + 1, 0
    if start <= hi:
        out.append((start, hi))
    return out


def _run_blocks(fn, blocks, workers: int):
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with get_context("fork").Pool(workers) as pool:
        return pool.map(fn, blocks)


def _table_from_parts(parts, algorithm, multiplier, targets, bound):
    qs = np.concatenate([p[0] for p in parts])
    counts = np.concatenate([p[1] for p in parts])
    mult = np.concatenate([p[2] for p in parts])
    return EnsembleTable(algorithm, multiplier, tuple(targets), qs, counts, mult, bound)


def _sparsify(block_lo, acc):
    """Dense per-block histogram -> sorted sparse rows (q, counts, mult)."""
    nz = np.nonzero(acc)
    qs = (nz[0] + block_lo).astype(np.int64)
    counts = np.stack([ix.astype(np.int64) for ix in nz[1:]], axis=1)
    return qs, counts, acc[nz].astype(np.int64)


# ---------------------------------------------------------------------------
# Gauss


def _gauss_block(args):
    (qlo, qhi), targets = args
    t = list(targets)
    d = len(t)
    ps, qs = [], []
    for q in range(qlo, qhi + 1):
        p = np.arange(1, q, dtype=np.int64)
        p = p[np.gcd(p, q) == 1]
        ps.append(p)
        qs.append(np.full(len(p), q, np.int64))
    if not ps:
        shape = (0, d)
        return np.zeros(0, np.int64), np.zeros(shape, np.int64), np.zeros(0, np.int64)
    a = np.concatenate(ps)
    b = np.concatenate(qs)
    q0 = b.copy()
    idx = np.arange(len(a))
    cnt = np.zeros((len(a), d), np.int64)
    while len(a):
        j = b // a
        for k, lab in enumerate(t):
            cnt[idx[j == lab], k] += 1
        a, b = b % a, a
        alive = a > 0
        a, b, idx = a[alive], b[alive], idx[alive]
    if cnt.size and cnt.max() >= _COUNT_CAP:
        raise OverflowError("digit count exceeded the histogram cap")
    shape = (qhi - qlo + 1,) + (_COUNT_CAP,) * d
    acc = np.zeros(shape, np.int64)
    np.add.at(acc, (q0 - qlo,) + tuple(cnt[:, k] for k in range(d)), 1)
    return _sparsify(qlo, acc)


def gauss_ensemble_table(bound: int, targets=(1,), workers: int = 1, block_lanes: int = 4_000_000):
    """Digit-count table for all coprime p/q with 2 <= q <= bound."""
    if not 1 <= len(targets) <= 2:
        raise ValueError("bulk sweeps support 1 or 2 targets; use the record path otherwise")
    blocks = _blocks(2, bound, block_lanes)
    parts = _run_blocks(_gauss_block, [(b, tuple(targets)) for b in blocks], workers)
    return _table_from_parts(parts, "gauss", 2, targets, bound)


def _gauss_verify_block(args):
    (qlo, qhi) = args
    ps, qs = [], []
    for q in range(qlo, qhi + 1):
        p = np.arange(1, q, dtype=np.int64)
        p = p[np.gcd(p, q) == 1]
        ps.append(p)
        qs.append(np.full(len(p), q, np.int64))
    a = np.concatenate(ps)
    b = np.concatenate(qs)
    p0, q0 = a.copy(), b.copy()
    n = len(a)
    # homography columns: M <- M @ [[0,1],[1,j]] swaps columns and shears
    c1 = np.zeros((n, 2), np.int64)
    c2 = np.zeros((n, 2), np.int64)
    c1[:, 0] = 1
    c2[:, 1] = 1
    wacc = np.zeros(n)
    idx = np.arange(n)
    while len(a):
        j = b // a
        wacc[idx] += 2.0 * (np.log(b) - np.log(a))
        c1[idx], c2[idx] = c2[idx].copy(), c1[idx] + j[:, None] * c2[idx]
        a, b = b % a, a
        alive = a > 0
        a, b, idx = a[alive], b[alive], idx[alive]
    fails = int(np.count_nonzero((c2[:, 0] != p0) | (c2[:, 1] != q0)))
    werr = float(np.abs(wacc - 2.0 * np.log(q0)).max()) if n else 0.0
    return n, fails, werr, int(max(c1.max(), c2.max()))


def gauss_verify(bound: int, workers: int = 1, block_lanes: int = 4_000_000) -> VerifyReport:
    """Exact round-trip and weight-telescoping check over all coprime p/q."""
    blocks = _blocks(2, bound, block_lanes)
    parts = _run_blocks(_gauss_verify_block, blocks, workers)
    return VerifyReport(
        sum(p[0] for p in parts),
        sum(p[1] for p in parts),
        max(p[2] for p in parts),
        max(p[3] for p in parts),
    )


# ---------------------------------------------------------------------------
# Brun, m = 2


def _brun2_lanes(qlo, qhi):
    """All coprime weakly-descending positive triples with t1 in [qlo, qhi]."""
    qs, u1s, u2s = [], [], []
    for t1 in range(qlo, qhi + 1):
        t2, t3 = np.meshgrid(
            np.arange(1, t1 + 1, dtype=np.int64),
            np.arange(1, t1 + 1, dtype=np.int64),
            indexing="ij",
        )
        keep = t3 <= t2
        t2, t3 = t2[keep], t3[keep]
        cop = np.gcd(np.gcd(t2, t3), t1) == 1
        t2, t3 = t2[cop], t3[cop]
        qs.append(np.full(len(t2), t1, np.int64))
        u1s.append(t2)
        u2s.append(t3)
    return np.concatenate(qs), np.concatenate(u1s), np.concatenate(u2s)


def _brun2_step(q, u1, u2):
    """One Brun step on tuple lanes (q; u1, u2); returns digit j and max pos."""
    i1 = u1 >= u2  # smallest index wins ties
    um = np.where(i1, u1, u2)
    j = q // um
    r = q - j * um
    nq = um
    nu1 = np.where(i1, u2, r)
    nu2 = np.where(i1, r, u1)
    return j, i1, nq, nu1, nu2


def _brun2_block(args):
    (qlo, qhi), targets = args
    t = list(targets)
    d = len(t)
    q, u1, u2 = _brun2_lanes(qlo, qhi)
    q0 = q.copy()
    idx = np.arange(len(q))
    cnt = np.zeros((len(q), d), np.int64)
    while len(q):
        j, i1, q, u1, u2 = _brun2_step(q, u1, u2)
        for k, lab in enumerate(t):
            cnt[idx[j == lab], k] += 1
        alive = (u1 > 0) | (u2 > 0)
        q, u1, u2, idx = q[alive], u1[alive], u2[alive], idx[alive]
    if cnt.size and cnt.max() >= _COUNT_CAP:
        raise OverflowError("digit count exceeded the histogram cap")
    shape = (qhi - qlo + 1,) + (_COUNT_CAP,) * d
    acc = np.zeros(shape, np.int64)
    np.add.at(acc, (q0 - qlo,) + tuple(cnt[:, k] for k in range(d)), 1)
    return _sparsify(qlo, acc)


def brun2_ensemble_table(bound: int, targets=(1,), workers: int = 1, block_lanes: int = 2_000_000):
    """Digit-count table for coprime descending triples with t1 <= bound."""
    if not 1 <= len(targets) <= 2:
        raise ValueError("bulk sweeps support 1 or 2 targets")
    blocks = _blocks(1, bound, max(1, int(block_lanes**0.5)))
    parts = _run_blocks(_brun2_block, [(b, tuple(targets)) for b in blocks], workers)
    return _table_from_parts(parts, "brun", 3, targets, bound)


def _brun2_verify_block(args):
    (qlo, qhi) = args
    q, u1, u2 = _brun2_lanes(qlo, qhi)
    n = len(q)
    q0, u10, u20 = q.copy(), u1.copy(), u2.copy()
    cols = np.zeros((n, 3, 3), np.int64)
    cols[:, 0, 0] = cols[:, 1, 1] = cols[:, 2, 2] = 1  # cols[:, :, k] = k-th column
    wacc = np.zeros(n)
    idx = np.arange(n)
    while len(q):
        j, i1, nq, nu1, nu2 = _brun2_step(q, u1, u2)
        um = np.where(i1, u1, u2)
        wacc[idx] += 3.0 * (np.log(q) - np.log(um))
        c = cols[idx]
        jj = j[:, None]
        # M <- M @ B(i, j); B(1,j) cols = (e2, e3, e1 + j e3), B(2,j) cols = (e3, e1, e2 + j e3)
        b1 = np.stack([c[:, :, 1], c[:, :, 2], c[:, :, 0] + jj * c[:, :, 2]], axis=2)
        b2 = np.stack([c[:, :, 2], c[:, :, 0], c[:, :, 1] + jj * c[:, :, 2]], axis=2)
        cols[idx] = np.where(i1[:, None, None], b1, b2)
        q, u1, u2 = nq, nu1, nu2
        alive = (u1 > 0) | (u2 > 0)
        q, u1, u2, idx = q[alive], u1[alive], u2[alive], idx[alive]
    last = cols[:, :, 2]
    fails = int(
        np.count_nonzero((last[:, 0] != u10) | (last[:, 1] != u20) | (last[:, 2] != q0))
    )
    werr = float(np.abs(wacc - 3.0 * np.log(q0)).max()) if n else 0.0
    return n, fails, werr, int(cols.max())


def brun2_verify(bound: int, workers: int = 1) -> VerifyReport:
    blocks = _blocks(1, bound, 700)
    parts = _run_blocks(_brun2_verify_block, blocks, workers)
    return VerifyReport(
        sum(p[0] for p in parts),
        sum(p[1] for p in parts),
        max(p[2] for p in parts),
        max(p[3] for p in parts),
    )


# ---------------------------------------------------------------------------
# Jacobi-Perron


def _jp_lanes(qlo, qhi):
    qs, ps, rs = [], [], []
    for q in range(qlo, qhi + 1):
        p, r = np.meshgrid(
            np.arange(1, q + 1, dtype=np.int64),
            np.arange(0, q + 1, dtype=np.int64),
            indexing="ij",
        )
        p, r = p.ravel(), r.ravel()
        cop = np.gcd(np.gcd(p, r), q) == 1
        p, r = p[cop], r[cop]
        qs.append(np.full(len(p), q, np.int64))
        ps.append(p)
        rs.append(r)
    return np.concatenate(ps), np.concatenate(rs), np.concatenate(qs)


def _jp_sweep_block(args):
    """Floor recursion with the two closed-form rescue families.

    Lanes that terminate cleanly or via a rescue get their digit counts
    vectorized; the remainder falls back to the full search in
    orbits.jp_digits.  Returns (q0, counts, expandable mask).
    """
    (qlo, qhi), targets = args
    t = list(targets)
    d = len(t)
    p, r, q = _jp_lanes(qlo, qhi)
    n = len(p)
    p0, r0, q0 = p.copy(), r.copy(), q.copy()
    cnt = np.zeros((n, d), np.int64)
    expandable = np.zeros(n, bool)
    need_dfs = np.zeros(n, bool)
    prev_diag = np.zeros(n, bool)
    idx = np.arange(n)

    def bump(lanes, a_val, b_val):
        for k, (ta, tb) in enumerate(t):
            hit = (a_val == ta) & (b_val == tb)
            cnt[lanes[hit], k] += 1

    while len(p):
        a = r // p
        b = q // p
        # diagonal states (r == p, p >= 2): succeed iff q % p == 1 via
        # digits (0, b), (0, 1), (0, p); a = 0 is blocked after a diagonal
        diag_state = (r == p) & (p >= 2)
        dg_ok = diag_state & (q % p == 1) & ~prev_diag
        if dg_ok.any():
            lanes = idx[dg_ok]
            assert np.all(p[dg_ok] >= 2)  # terminal digit (0, p) admissible
            bump(lanes, np.zeros(lanes.shape, np.int64), b[dg_ok])
            bump(lanes, np.zeros(lanes.shape, np.int64), np.ones(lanes.shape, np.int64))
            bump(lanes, np.zeros(lanes.shape, np.int64), p[dg_ok])
            expandable[lanes] = True
        dg_fail = diag_state & ~dg_ok
        need_dfs[idx[dg_fail]] = True

        live = ~diag_state
        # dead floor step: p | r with p >= 2; rescue (r/p - 1, b), (0,1), (0,p)
        # requires q % p == 1 and a nonzero first digit after a diagonal
        dead = live & (r % p == 0) & (p >= 2)
        r1 = dead & (r > 0) & (q % p == 1) & ~(prev_diag & (r // p == 1))
        if r1.any():
            lanes = idx[r1]
            # the deviated digit may not be diagonal, else the (0, 1) after
            # it would be inadmissible
            assert np.all((r // p - 1)[r1] < b[r1])
            assert np.all(p[r1] >= 2)
            bump(lanes, (r // p - 1)[r1], b[r1])
            bump(lanes, np.zeros(lanes.shape, np.int64), np.ones(lanes.shape, np.int64))
            bump(lanes, np.zeros(lanes.shape, np.int64), p[r1])
            expandable[lanes] = True
        need_dfs[idx[dead & ~r1]] = True

        step = live & ~dead
        # pairwise admissibility along the floor path: after a diagonal
        # digit the state satisfies r >= p, so a >= 1
        assert not np.any(prev_diag & step & (a == 0))
        lanes = idx[step]
        bump(lanes, a[step], b[step])
        np_, nr = r - a * p, q - b * p
        done = step & (np_ == 0)  # exact termination: here p == 1
        assert np.all(b[done] >= 2)
        expandable[idx[done]] = True
        cont = step & ~done
        prev_diag = (a == b)[cont]
        p, r, q = np_[cont], nr[cont], p[cont]
        idx = idx[cont]

    hard = np.nonzero(need_dfs)[0]
    for i in hard:
        try:
            ds = jp_digits(int(p0[i]), int(r0[i]), int(q0[i]))
        except NotExpandableError:
            continue
        _validate_jp_string(int(p0[i]), int(r0[i]), int(q0[i]), ds)
        expandable[i] = True
        for k, lab in enumerate(t):
            cnt[i, k] = sum(1 for dd in ds if dd.label == lab)
    return q0, cnt, expandable


def jp_ensemble_table(bound: int, targets=((1, 2),), workers: int = 1):
    """Digit-count table over all expandable coprime (p, r, q), q <= bound."""
    if not 1 <= len(targets) <= 2:
        raise ValueError("bulk sweeps support 1 or 2 targets")
    blocks = _blocks(2, bound, 400)  # ~q^2 lanes per denominator
    raw = _run_blocks(_jp_sweep_block, [(b, tuple(targets)) for b in blocks], workers)
    parts = []
    d = len(targets)
    for (qlo, qhi), (q0, cnt, exp) in zip(blocks, raw):
        if cnt[exp].size and cnt[exp].max() >= _COUNT_CAP:
            raise OverflowError("digit count exceeded the histogram cap")
        shape = (qhi - qlo + 1,) + (_COUNT_CAP,) * d
        acc = np.zeros(shape, np.int64)
        sel = exp
        np.add.at(acc, (q0[sel] - qlo,) + tuple(cnt[sel, k] for k in range(d)), 1)
        parts.append(_sparsify(qlo, acc))
    return _table_from_parts(parts, "jp", 3, targets, bound)


def jp_count_points(bound: int, workers: int = 1) -> int:
    """Number of expandable coprime triples with q <= bound."""
    blocks = _blocks(2, bound, 400)
    raw = _run_blocks(_jp_sweep_block, [(b, ((1, 2),)) for b in blocks], workers)
    return int(sum(part[2].sum() for part in raw))


def _validate_jp_string(p: int, r: int, q: int, digits) -> None:
    """Raise unless the string is pairwise admissible, ends with b >= 2,
    and recomposes to (p/q, r/q) by the exact integer column recursion."""
    for prev, nxt in zip(digits, digits[1:]):
        if prev.diagonal and nxt.a == 0:
            raise AssertionError(f"inadmissible pair after diagonal at ({p},{r},{q})")
    if digits[-1].b < 2:
        raise AssertionError(f"terminal digit b < 2 at ({p},{r},{q})")
    c1, c2, c3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    for dd in digits:
        c1, c2, c3 = c2, c3, tuple(
            c1[k] + dd.a * c2[k] + dd.b * c3[k] for k in range(3)
        )
    if c3 != (p, r, q):
        raise AssertionError(f"digit string does not recompose ({p},{r},{q})")


class _JPVerifyState:
    """Exact 3x3 column recursion M <- M @ B(a, b) over lanes."""

    def __init__(self, n):
        self.cols = np.zeros((n, 3, 3), np.int64)
        self.cols[:, 0, 0] = self.cols[:, 1, 1] = self.cols[:, 2, 2] = 1

    def step(self, lanes, a, b):
        c = self.cols[lanes]
        new3 = c[:, :, 0] + a[:, None] * c[:, :, 1] + b[:, None] * c[:, :, 2]
        self.cols[lanes] = np.stack([c[:, :, 1], c[:, :, 2], new3], axis=2)


def _jp_verify_block(args):
    """Round-trip and weight check over every expandable triple in the block."""
    (qlo, qhi) = args
    p, r, q = _jp_lanes(qlo, qhi)
    n = len(p)
    p0, r0, q0 = p.copy(), r.copy(), q.copy()
    state = _JPVerifyState(n)
    wacc = np.zeros(n)
    expandable = np.zeros(n, bool)
    need_dfs = np.zeros(n, bool)
    prev_diag = np.zeros(n, bool)
    idx = np.arange(n)

    def rescue(lanes, firsts_a, firsts_b, pv, qv):
        # digits (first), (0, 1), (0, p); states p/q, then (p, x, p), (x', 0, p)
        state.step(lanes, firsts_a, firsts_b)
        state.step(lanes, np.zeros(len(lanes), np.int64), np.ones(len(lanes), np.int64))
        state.step(lanes, np.zeros(len(lanes), np.int64), pv)
        wacc[lanes] += 3.0 * (np.log(qv) - np.log(pv)) + 3.0 * np.log(pv)

    while len(p):
        a = r // p
        b = q // p
        diag_state = (r == p) & (p >= 2)
        dg_ok = diag_state & (q % p == 1) & ~prev_diag
        if dg_ok.any():
            lanes = idx[dg_ok]
            rescue(lanes, np.zeros(len(lanes), np.int64), b[dg_ok], p[dg_ok], q[dg_ok])
            expandable[lanes] = True
        need_dfs[idx[diag_state & ~dg_ok]] = True

        live = ~diag_state
        dead = live & (r % p == 0) & (p >= 2)
        r1 = dead & (r > 0) & (q % p == 1) & ~(prev_diag & (r // p == 1))
        if r1.any():
            lanes = idx[r1]
            rescue(lanes, (r // p - 1)[r1], b[r1], p[r1], q[r1])
            expandable[lanes] = True
        need_dfs[idx[dead & ~r1]] = True

        step = live & ~dead
        lanes = idx[step]
        state.step(lanes, a[step], b[step])
        wacc[lanes] += 3.0 * (np.log(q[step]) - np.log(p[step]))
        np_, nr = r - a * p, q - b * p
        done = step & (np_ == 0)
        expandable[idx[done]] = True
        cont = step & ~done
        prev_diag = (a == b)[cont]
        p, r, q = np_[cont], nr[cont], p[cont]
        idx = idx[cont]

    hard = np.nonzero(need_dfs)[0]
    # discard the partial floor prefix accumulated before the dead end;
    # hard lanes are recomposed exactly inside _validate_jp_string, so on
    # success their column state is set to the validated answer
    state.cols[hard] = np.eye(3, dtype=np.int64)
    wacc[hard] = 0.0
    hard_fails = 0
    for i in hard:
        pi, ri, qi = int(p0[i]), int(r0[i]), int(q0[i])
        try:
            ds = jp_digits(pi, ri, qi)
        except NotExpandableError:
            continue
        try:
            _validate_jp_string(pi, ri, qi, ds)
        except AssertionError:
            hard_fails += 1
            continue
        expandable[i] = True
        state.cols[i, :, 2] = (pi, ri, qi)
        w = 0.0
        st = (pi, ri, qi)
        for dd in ds:
            w += 3.0 * (math.log(st[2]) - math.log(st[0]))
            st = (st[1] - dd.a * st[0], st[2] - dd.b * st[0], st[0])
        wacc[i] = w

    last = state.cols[:, :, 2]
    sel = expandable
    fails = hard_fails + int(
        np.count_nonzero(
            (last[sel, 0] != p0[sel]) | (last[sel, 1] != r0[sel]) | (last[sel, 2] != q0[sel])
        )
    )
    werr = float(np.abs(wacc[sel] - 3.0 * np.log(q0[sel])).max()) if sel.any() else 0.0
    return int(sel.sum()), fails, werr, int(state.cols[sel].max() if sel.any() else 1)


def jp_verify(bound: int, workers: int = 1) -> VerifyReport:
    blocks = _blocks(2, bound, 400)
    parts = _run_blocks(_jp_verify_block, blocks, workers)
    return VerifyReport(
        sum(p[0] for p in parts),
        sum(p[1] for p in parts),
        max(p[2] for p in parts),
        max(p[3] for p in parts),
    )
