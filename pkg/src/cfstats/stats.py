"""Empirical digit statistics over enumerated trajectory ensembles.

The sufficient statistic for every quantity here is the multiplicity
table (denominator q, digit-count vector) of an ensemble, since the
weight of a point is multiplier * log q exactly.  Tables are built from
a record stream (any algorithm, any targets) or by the vectorized
sweeps in bulk.py; both paths produce identical tables on identical
ensembles.

All floating-point reductions go through compensated (Kahan) summation
over fixed 4096-element chunks combined in order, so results are
bit-reproducible across runs and do not depend on how the work was
partitioned.

The empirical covariance reported for the rescaled centred counts is
the uncentered second-moment matrix: the centring already happened
through the weight term, the limit law has mean zero, and this choice
makes the second-moment table identity exact.  The empirical mean is
reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

_CHUNK = 4096


def kahan_sum(values) -> float:
    """Compensated sum over fixed-size chunks, combined in order."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    total = 0.0
    comp = 0.0
    for start in range(0, len(arr), _CHUNK):
        chunk = arr[start : start + _CHUNK]
        s = 0.0
        c = 0.0
        for v in chunk.tolist():
            y = v - c
            t = s + y
            c = (t - s) - y
            s = t
        y = s - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _dot(a, b) -> float:
    """Deterministic chunked product-sum (Kahan over chunk partials)."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    partials = [
        float(np.dot(a[s : s + _CHUNK], b[s : s + _CHUNK])) for s in range(0, len(a), _CHUNK)
    ]
    return kahan_sum(partials)


# ---------------------------------------------------------------------------
# target sets and tables


@dataclass(frozen=True)
class TargetSet:
    """Distinct digit labels to count (ints, or (a, b) pairs for JP)."""

    labels: tuple

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("need at least one target label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("target labels must be distinct")

    def __len__(self):
        return len(self.labels)


def count_digits(digits, targets) -> tuple:
    """Occurrences of each target label in a digit string."""
    labels = targets.labels if isinstance(targets, TargetSet) else tuple(targets)
    counts = [0] * len(labels)
    for d in digits:
        lab = d.label if hasattr(d, "label") else d
        for k, t in enumerate(labels):
            if lab == t:
                counts[k] += 1
    return tuple(counts)


def centre(nbar, w: float, lambda_bar) -> tuple:
    """Centred counts: N_k - w * Lambda_k, entrywise."""
    if len(nbar) != len(lambda_bar):
        raise ValueError("dimension mismatch")
    return tuple(n - w * lam for n, lam in zip(nbar, lambda_bar))


@dataclass
class EnsembleTable:
    """Multiplicity table (q, count vector) -> count for one ensemble.

    Rows are sorted by (q, counts); weights are multiplier * log q.
    """

    algorithm: str
    multiplier: int
    targets: tuple
    qs: np.ndarray
    counts: np.ndarray  # shape (K, d)
    mult: np.ndarray
    denominator_bound: int

    def __post_init__(self):
        order = np.lexsort(tuple(self.counts[:, k] for k in range(self.counts.shape[1] - 1, -1, -1)) + (self.qs,))
        self.qs = np.ascontiguousarray(self.qs[order])
        self.counts = np.ascontiguousarray(self.counts[order])
        self.mult = np.ascontiguousarray(self.mult[order])

    @classmethod
    def from_records(cls, records, targets, algorithm=None, denominator_bound=0):
        """Reduce a trajectory-record stream to its multiplicity table."""
        targets = targets.labels if isinstance(targets, TargetSet) else tuple(targets)
        rows: dict = {}
        algo = algorithm
        bound = denominator_bound
        mult = None
        for rec in records:
            key = (rec.point.denominator,) + tuple(
                sum(1 for d in rec.digits if d.label == t) for t in targets
            )
            rows[key] = rows.get(key, 0) + 1
            mult = rec.weight_multiplier
            bound = max(bound, rec.point.denominator)
        if not rows:
            raise ValueError("empty ensemble")
        keys = np.array(sorted(rows), dtype=np.int64)
        return cls(
            algo or "unknown",
            mult,
            targets,
            keys[:, 0],
            keys[:, 1:],
            np.array([rows[tuple(k)] for k in map(tuple, keys)], dtype=np.int64),
            bound,
        )

    @property
    def d(self) -> int:
        return self.counts.shape[1]

    @property
    def size(self) -> int:
        return int(self.mult.sum())

    @property
    def weights(self) -> np.ndarray:
        return self.multiplier * np.log(self.qs.astype(np.float64))

    def Q_nominal(self) -> float:
        """Weight scale of the full table: multiplier * log(bound)."""
        return self.multiplier * math.log(self.denominator_bound)

    def restrict(self, denominator_bound: int) -> "EnsembleTable":
        keep = self.qs <= denominator_bound
        return EnsembleTable(
            self.algorithm,
            self.multiplier,
            self.targets,
            self.qs[keep],
            self.counts[keep],
            self.mult[keep],
            denominator_bound,
        )

    def restrict_weight(self, Q: float) -> "EnsembleTable":
        """Sub-ensemble with w(x) < Q strictly."""
        bound = int(math.floor(math.exp(Q / self.multiplier)))
        while self.multiplier * math.log(bound) >= Q:
            bound -= 1
        return self.restrict(bound)


# ---------------------------------------------------------------------------
# scalar statistics


def empirical_lambda(table: EnsembleTable, Q: float | None = None) -> np.ndarray:
    """Ensemble mean of counts over Q, one entry per target."""
    if table.size == 0:
        raise ValueError("empty ensemble")
    Q = table.Q_nominal() if Q is None else Q
    m = table.mult.astype(np.float64)
    return np.array(
        [_dot(m, table.counts[:, k]) / (Q * table.size) for k in range(table.d)]
    )


def growth_constant(table: EnsembleTable, Q: float | None = None) -> tuple:
    """(ensemble size, size * exp(-Q))."""
    Q = table.Q_nominal() if Q is None else Q
    n = table.size
    return n, n * math.exp(-Q)


def ks_distance(values, weights, cdf) -> float:
    """Exact sup distance between a weighted empirical CDF and a CDF."""
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    x = values[order]
    w = weights[order]
    total = w.sum()
    hi = np.cumsum(w) / total
    lo = hi - w / total
    g = cdf(x)
    return float(max(np.abs(hi - g).max(), np.abs(lo - g).max()))


def gaussian_cdf(x, sigma: float):
    """Standard-accuracy normal CDF (absolute error well below 1e-10)."""
    return ndtr(np.asarray(x, dtype=np.float64) / sigma)


@dataclass
class EmpiricalSummary:
    ensemble_size: int
    Q: float
    targets: tuple
    lambda_used: np.ndarray
    lambda_empirical: np.ndarray
    mean_phi: np.ndarray
    covariance: np.ndarray  # uncentered second moment of phi / sqrt(Q)
    sigma_spectral: np.ndarray
    ks_distance: np.ndarray
    histograms: list  # per target: (bin_edges, counts)
    moments: dict
    low_confidence: bool
    ldp: dict = field(default_factory=dict)


def _phi_matrix(table: EnsembleTable, lambda_bar, Q: float) -> np.ndarray:
    w = table.weights
    lam = np.asarray(lambda_bar, dtype=np.float64)
    return (table.counts.astype(np.float64) - w[:, None] * lam[None, :]) / math.sqrt(Q)


def clt_summary(
    table: EnsembleTable,
    lambda_bar,
    Q: float | None = None,
    sigma_matrix=None,
    bins: int = 101,
) -> EmpiricalSummary:
    """Distributional summary of the rescaled centred counts.

    lambda_bar is the centring vector (spectral by default in the CLI;
    pass the empirical estimate to recentre empirically).  sigma_matrix
    supplies the marginal scales for the fixed histogram range
    [-5 sigma, 5 sigma] and the reference Gaussians for the KS
    distances; it defaults to the empirical second moment.
    """
    Q = table.Q_nominal() if Q is None else Q
    lam = np.asarray(lambda_bar, dtype=np.float64)
    phi = _phi_matrix(table, lam, Q)
    m = table.mult.astype(np.float64)
    total = table.size
    d = table.d
    mean_phi = np.array([_dot(m, phi[:, k]) / total for k in range(d)])
    cov = np.empty((d, d))
    for i in range(d):
        for k in range(i, d):
            cov[i, k] = cov[k, i] = _dot(m, phi[:, i] * phi[:, k]) / total
    sig = np.asarray(sigma_matrix, dtype=np.float64) if sigma_matrix is not None else cov
    sigmas = np.sqrt(np.diag(sig))
    ks = np.array(
        [ks_distance(phi[:, k], m, lambda x: gaussian_cdf(x, sigmas[k])) for k in range(d)]
    )
    hists = []
    for k in range(d):
        edges = np.linspace(-5.0 * sigmas[k], 5.0 * sigmas[k], bins + 1)
        counts, _ = np.histogram(phi[:, k], bins=edges, weights=m)
        hists.append((edges, counts.astype(np.int64)))
    moments = moment_table(table, lam, Q=Q)
    return EmpiricalSummary(
        ensemble_size=total,
        Q=Q,
        targets=table.targets,
        lambda_used=lam,
        lambda_empirical=empirical_lambda(table, Q),
        mean_phi=mean_phi,
        covariance=cov,
        sigma_spectral=sig,
        ks_distance=ks,
        histograms=hists,
        moments=moments,
        low_confidence=total < 100,
    )


def _multi_indices(d: int, max_order: int):
    def rec(prefix, remaining, slots):
        if slots == 0:
            if sum(prefix) >= 1:
                yield tuple(prefix)
            return
        for v in range(remaining + 1):
            yield from rec(prefix + [v], remaining - v, slots - 1)

    seen = set()
    for order in range(1, max_order + 1):
        for ix in rec([], order, d):
            if sum(ix) <= max_order:
                seen.add(ix)
    return sorted(seen, key=lambda ix: (sum(ix), ix))


def moment_table(table: EnsembleTable, lambda_bar, Q: float | None = None, max_order: int = 4) -> dict:
    """Normalized mixed moments of the centred counts.

    Entry p-hat maps to sum of phi^p-hat over the ensemble divided by
    (size * Q^{|p-hat|/2}).  Even orders approach the Gaussian pairing
    values, odd orders approach zero.
    """
    Q = table.Q_nominal() if Q is None else Q
    lam = np.asarray(lambda_bar, dtype=np.float64)
    w = table.weights
    phi = table.counts.astype(np.float64) - w[:, None] * lam[None, :]
    m = table.mult.astype(np.float64)
    total = table.size
    out = {}
    for ix in _multi_indices(table.d, max_order):
        order = sum(ix)
        term = np.ones(len(w))
        for k, power in enumerate(ix):
            if power:
                term = term * phi[:, k] ** power
        out[ix] = _dot(m, term) / (total * Q ** (order / 2.0))
    return out


def wick_moment(sigma: np.ndarray, index: tuple) -> float:
    """Gaussian mixed moment for a covariance matrix by pair partitioning."""
    flat = []
    for k, power in enumerate(index):
        flat.extend([k] * power)
    if len(flat) % 2 == 1:
        return 0.0

    def pairings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for i in range(len(rest)):
            for tail in pairings(rest[:i] + rest[i + 1 :]):
                yield [(first, rest[i])] + tail

    return float(
        sum(math.prod(sigma[i, k] for i, k in prs) for prs in pairings(flat))
    )


def ldp_tail(tables_by_Q, target_index: int, lambda_j: float, eps: float) -> dict:
    """Deviation proportions over a Q grid and the fitted log-slope.

    tables_by_Q is a list of (Q, table) with increasing Q (at least 4
    points).  Zero proportions are recorded as -inf log-proportion and
    excluded from the least-squares fit.
    """
    if len(tables_by_Q) < 4:
        raise ValueError("need at least 4 grid points")
    if eps <= 0:
        raise ValueError("eps must be positive")
    Qs, props = [], []
    for Q, table in tables_by_Q:
        m = table.mult.astype(np.float64)
        dev = np.abs(table.counts[:, target_index] / Q - lambda_j) > eps
        props.append(float(m[dev].sum() / table.size))
        Qs.append(Q)
    logp = [math.log(p) if p > 0 else -math.inf for p in props]
    pts = [(q, lp) for q, lp in zip(Qs, logp) if lp > -math.inf]
    if len(pts) >= 2:
        qa = np.array([p[0] for p in pts])
        la = np.array([p[1] for p in pts])
        slope, intercept = np.polyfit(qa, la, 1)
    else:
        slope, intercept = math.nan, math.nan
    return {
        "Q": Qs,
        "proportion": props,
        "log_proportion": logp,
        "slope": float(slope),
        "intercept": float(intercept),
        "eps": eps,
        "nonincreasing": all(b <= a for a, b in zip(props, props[1:])),
    }


def dirichlet_partial_sum(
    table: EnsembleTable, s: float, t=None, Q: float | None = None, log: bool = False
) -> float:
    """Truncated two-variable series sum of exp(-s w + <t, counts>).

    Terms are q^(-s * multiplier) * exp(<t, counts>).  With log=True the
    natural log of the sum is accumulated by log-sum-exp, which stays
    finite in parameter ranges where the terms themselves overflow or
    underflow double precision.
    """
    if Q is not None:
        table = table.restrict_weight(Q)
    t = np.zeros(table.d) if t is None else np.asarray(t, dtype=np.float64)
    if len(t) != table.d:
        raise ValueError("t dimension mismatch")
    logterm = -s * table.weights + table.counts.astype(np.float64) @ t
    m = table.mult.astype(np.float64)
    if logterm.size == 0:
        return -math.inf if log else 0.0
    if log:
        shift = float(logterm.max())
        return shift + math.log(kahan_sum(np.exp(logterm - shift) * m))
    return _dot(m, np.exp(logterm))
