import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import ndtr

from cfstats import bulk, stats
from cfstats.maps import GAUSS, BRUN2, GaussDigit
from cfstats.orbits import brun_gcd_digits, enumerate_trajectories
from cfstats.stats import (
    EnsembleTable,
    TargetSet,
    centre,
    clt_summary,
    count_digits,
    dirichlet_partial_sum,
    empirical_lambda,
    gaussian_cdf,
    growth_constant,
    kahan_sum,
    ks_distance,
    ldp_tail,
    moment_table,
    wick_moment,
)


def synthetic_table(rows, targets=(1,), algorithm="gauss", multiplier=2):
    """rows: list of (q, counts tuple, multiplicity)."""
    qs = np.array([r[0] for r in rows], dtype=np.int64)
    counts = np.array([r[1] for r in rows], dtype=np.int64)
    mult = np.array([r[2] for r in rows], dtype=np.int64)
    return EnsembleTable(algorithm, multiplier, tuple(targets), qs, counts, mult, int(qs.max()))


class TestCounting:
    def test_examples(self):
        assert count_digits([GaussDigit(2), GaussDigit(2)], TargetSet((1, 2))) == (0, 2)
        assert count_digits([GaussDigit(2), GaussDigit(3)], TargetSet((2, 3, 5))) == (1, 1, 0)
        labels, _ = brun_gcd_digits((5, 3, 2))
        assert count_digits(labels, TargetSet((1,))) == (3,)

    def test_counts_bounded_by_depth(self):
        for rec in enumerate_trajectories(GAUSS, denominator_cap=40):
            cv = count_digits(rec.digits, TargetSet((1, 2, 3)))
            assert sum(cv) <= rec.depth

    def test_target_set_validation(self):
        with pytest.raises(ValueError):
            TargetSet(())
        with pytest.raises(ValueError):
            TargetSet((1, 1))


class TestCentre:
    def test_zero(self):
        assert centre((0,), 5.0, (0.0,)) == (0.0,)

    def test_formula(self):
        lam = 0.17
        w = 2 * math.log(5)
        assert centre((3,), w, (lam,)) == (3 - w * lam,)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            centre((1, 2), 1.0, (0.5,))

    def test_ensemble_mean_small_at_q15(self, gauss_small_table, coarse_gauss_deriv):
        # mean of phi_1/sqrt(Q) is near zero on the ensemble scale (the
        # residual is the finite-Q drift, a few percent of the spread)
        Q = 15.0
        table = gauss_small_table.restrict_weight(Q)
        lam = -coarse_gauss_deriv.lambda_t_raw / coarse_gauss_deriv.lambda_s
        summ = clt_summary(table, lam, Q=Q)
        spread = math.sqrt(summ.covariance[0, 0])
        assert abs(summ.mean_phi[0]) < 3 * spread


class TestEmpiricalLambda:
    def test_absent_target_zero(self):
        t = bulk.gauss_ensemble_table(50, targets=(1, 101))
        lam = empirical_lambda(t)
        assert lam[1] == 0.0
        assert lam[0] > 0

    def test_brun_stable_over_bound_increments(self):
        a = empirical_lambda(bulk.brun2_ensemble_table(60, targets=(1,)))
        b = empirical_lambda(bulk.brun2_ensemble_table(80, targets=(1,)))
        assert a[0] > 0 and b[0] > 0
        assert abs(b[0] / a[0] - 1) < 0.05

    def test_empty_raises(self, gauss_small_table):
        empty = gauss_small_table.restrict(1)
        with pytest.raises(ValueError):
            empirical_lambda(empty)

    def test_streaming_equals_batch_bitwise(self):
        recs = list(enumerate_trajectories(GAUSS, denominator_cap=80))
        t_all = EnsembleTable.from_records(iter(recs), (1, 2), "gauss")
        t_two = EnsembleTable.from_records(iter(recs[:500] + recs[500:]), (1, 2), "gauss")
        a = empirical_lambda(t_all, 8.0)
        b = empirical_lambda(t_two, 8.0)
        assert a.tolist() == b.tolist()


class TestGrowth:
    def test_gauss_totient(self, gauss_small_table):
        Q = 2 * math.log(300)
        n, scaled = growth_constant(gauss_small_table, Q)
        assert n == bulk.totient_sum(300)
        assert abs(scaled - 3 / math.pi**2) < 0.01

    def test_below_smallest_weight(self, gauss_small_table):
        sub = gauss_small_table.restrict_weight(2 * math.log(2))
        n, scaled = growth_constant(sub, 2 * math.log(2))
        assert n == 0 and scaled == 0

    def test_jp_ratio_cauchy(self):
        r = [bulk.jp_count_points(n) / n**3 for n in (40, 60, 80)]
        assert abs(r[2] / r[1] - 1) < abs(r[1] / r[0] - 1) + 0.05
        assert all(v > 0 for v in r)


class TestKS:
    def test_degenerate_point_mass(self):
        # a constant ensemble: phi identically zero against a continuous law
        t = synthetic_table([(5, (2,), 1000)])
        lam = np.array([2.0 / (2 * math.log(5))])
        summ = clt_summary(t, lam, sigma_matrix=np.array([[0.2]]))
        assert summ.covariance[0, 0] == 0.0
        assert summ.ks_distance[0] == pytest.approx(0.5)

    def test_gaussian_calibration(self):
        rng = np.random.default_rng(42)
        n = 4000
        xs = rng.standard_normal(n)
        d = ks_distance(xs, np.ones(n), lambda v: gaussian_cdf(v, 1.0))
        assert d < 1.36 / math.sqrt(n)

    @given(
        st.lists(st.floats(-50, 50), min_size=5, max_size=60, unique=True),
        st.floats(0.1, 4.0),
        st.floats(-3.0, 3.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_invariant_under_increasing_reparameterization(self, xs, a, b):
        xs = np.array(xs)
        w = np.ones(len(xs))
        cdf = lambda v: gaussian_cdf(v, 5.0)
        d0 = ks_distance(xs, w, cdf)
        transformed = a * xs + b
        d1 = ks_distance(transformed, w, lambda v: cdf((v - b) / a))
        assert d1 == pytest.approx(d0, abs=1e-12)


class TestCLTSummary:
    def test_covariance_psd_and_symmetric(self, gauss_small_table, coarse_gauss_deriv):
        lam = -coarse_gauss_deriv.lambda_t_raw / coarse_gauss_deriv.lambda_s
        summ = clt_summary(gauss_small_table, lam)
        cov = summ.covariance
        assert np.array_equal(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() >= -1e-12

    def test_low_confidence_flag(self):
        t = synthetic_table([(5, (1,), 20), (7, (2,), 30)])
        summ = clt_summary(t, np.array([0.2]))
        assert summ.low_confidence

    def test_histogram_layout(self, gauss_small_table, coarse_gauss_deriv):
        lam = -coarse_gauss_deriv.lambda_t_raw / coarse_gauss_deriv.lambda_s
        summ = clt_summary(gauss_small_table, lam, bins=101)
        edges, counts = summ.histograms[0]
        assert len(edges) == 102 and len(counts) == 101
        sig = math.sqrt(summ.sigma_spectral[0, 0])
        assert edges[0] == pytest.approx(-5 * sig) and edges[-1] == pytest.approx(5 * sig)


class TestMoments:
    def test_second_moment_equals_covariance_bitwise(self, gauss_small_table, coarse_gauss_deriv):
        lam = -coarse_gauss_deriv.lambda_t_raw / coarse_gauss_deriv.lambda_s
        Q = gauss_small_table.Q_nominal()
        summ = clt_summary(gauss_small_table, lam, Q=Q)
        moms = moment_table(gauss_small_table, lam, Q=Q)
        assert moms[(2, 0)] == pytest.approx(summ.covariance[0, 0], abs=1e-12)
        assert moms[(1, 1)] == pytest.approx(summ.covariance[0, 1], abs=1e-12)

    def test_odd_moments_small(self, gauss_small_table, coarse_gauss_deriv):
        lam = -coarse_gauss_deriv.lambda_t_raw / coarse_gauss_deriv.lambda_s
        moms = moment_table(gauss_small_table, lam)
        assert abs(moms[(1, 0)]) < 0.2
        assert abs(moms[(3, 0)]) < 0.2

    def test_wick_on_synthetic_gaussian(self):
        rng = np.random.default_rng(7)
        n = 200_000
        sigma2 = 0.21
        xs = rng.normal(0.0, math.sqrt(sigma2), n)
        m4 = float(np.mean(xs**4))
        assert m4 == pytest.approx(wick_moment(np.array([[sigma2]]), (4,)), rel=0.05)

    def test_wick_pair_count(self):
        sig = np.array([[2.0]])
        assert wick_moment(sig, (2,)) == 2.0
        assert wick_moment(sig, (4,)) == 3 * 4.0  # three pairings of sigma^2
        assert wick_moment(sig, (3,)) == 0.0


class TestLDP:
    def synthetic_grid(self):
        tables = []
        for Q in (8.0, 10.0, 12.0, 14.0):
            t = synthetic_table([(3, (0,), 50), (5, (1,), 50), (7, (3,), 10)])
            tables.append((Q, t))
        return tables

    def test_eps_larger_than_any_deviation(self):
        out = ldp_tail(self.synthetic_grid(), 0, 0.17, eps=100.0)
        assert out["proportion"] == [0.0] * 4
        assert all(lp == -math.inf for lp in out["log_proportion"])
        assert math.isnan(out["slope"])

    def test_eps_tiny_everything_deviates(self):
        out = ldp_tail(self.synthetic_grid(), 0, 0.123456, eps=1e-12)
        assert out["proportion"] == [1.0] * 4

    def test_gauss_slope_negative(self, gauss_small_table, coarse_gauss_deriv):
        lam1 = float((-coarse_gauss_deriv.lambda_t_raw / coarse_gauss_deriv.lambda_s)[0])
        grid = [7.0, 8.5, 10.0, 11.4]
        tables = [(Q, gauss_small_table.restrict_weight(Q)) for Q in grid]
        out = ldp_tail(tables, 0, lam1, eps=0.75 * lam1)
        assert out["slope"] < 0

    def test_needs_four_points(self):
        with pytest.raises(ValueError):
            ldp_tail(self.synthetic_grid()[:3], 0, 0.1, eps=0.1)


class TestDirichlet:
    def test_large_s_tends_to_zero(self, gauss_small_table):
        vals = [dirichlet_partial_sum(gauss_small_table, s) for s in (2.0, 4.0, 8.0)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 1e-3

    def test_monotone_in_Q_for_t_zero(self, gauss_small_table):
        v1 = dirichlet_partial_sum(gauss_small_table, 1.5, Q=8.0)
        v2 = dirichlet_partial_sum(gauss_small_table, 1.5, Q=10.0)
        v3 = dirichlet_partial_sum(gauss_small_table, 1.5)
        assert v1 <= v2 <= v3

    def test_gauss_s2_against_double_loop_oracle(self):
        # s = 2, t = 0: sum over coprime pairs of q^{-4}
        table = bulk.gauss_ensemble_table(2000, targets=(1,))
        val = dirichlet_partial_sum(table, 2.0)
        phi = np.arange(2001, dtype=np.float64)
        for p in range(2, 2001):
            if phi[p] == p:
                phi[p::p] -= phi[p::p] / p
        oracle = float((phi[2:] / np.arange(2, 2001, dtype=np.float64) ** 4).sum())
        assert val == pytest.approx(oracle, rel=1e-12)

    def test_log_domain_guard(self):
        # terms underflow double precision; the log-domain path keeps them
        t = synthetic_table([(3, (0,), 2)])
        assert dirichlet_partial_sum(t, 900.0) == 0.0
        lv = dirichlet_partial_sum(t, 900.0, log=True)
        assert math.isfinite(lv)
        assert lv == pytest.approx(-900 * 2 * math.log(3) + math.log(2), rel=1e-12)


class TestKahan:
    def test_matches_fsum(self):
        rng = np.random.default_rng(3)
        xs = rng.normal(size=10_000) * 10.0 ** rng.integers(-8, 8, size=10_000)
        assert kahan_sum(xs) == pytest.approx(math.fsum(xs), rel=1e-14)
