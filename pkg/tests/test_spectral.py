import math

import numpy as np
import pytest
from scipy.special import zeta as hurwitz_zeta

import cfstats.spectral as spectral
from cfstats.maps import BRUN2, GAUSS, JP2
from cfstats.spectral import (
    ConvergenceError,
    GridFunction,
    MarkovViolationError,
    OperatorParams,
    apply_operator,
    brun_density_m2,
    covariance_matrix,
    eigenvalue_derivatives,
    frequency_constants,
    gauss_density,
    invariant_density,
    leading_eigenvalue,
    nonarithmeticity_witnesses,
)


class TestApplyOperator:
    def test_linearity_zero(self):
        f = GridFunction.constant(1, 64, 0.0)
        g = apply_operator(f, OperatorParams(1.0, (), (), 100), GAUSS)
        assert np.all(g.values == 0.0)

    def test_gauss_invariant_density_is_fixed_point(self):
        G = 512
        f = GridFunction(1, G, gauss_density((np.arange(G) + 0.5) / G))
        g = apply_operator(f, OperatorParams(1.0, (), (), 10_000), GAUSS)
        assert float(np.abs(g.values - f.values).max()) < 1e-6

    def test_constant_function_branch_sum_matches_zeta(self):
        # s = 2, f = 1: the node values are Hurwitz zeta sums 2s = 4
        G = 64
        f = GridFunction.constant(1, G)
        g = apply_operator(f, OperatorParams(2.0, (), (), 10_000), GAUSS)
        x = f.nodes[0]
        ref = hurwitz_zeta(4.0, 1.0 + x)
        assert float(np.abs(g.values - ref).max()) < 1e-10
        assert hurwitz_zeta(4.0, 1.0) == pytest.approx(math.pi**4 / 90, rel=1e-14)

    def test_digit_weight_multiplies_one_branch(self):
        G = 32
        f = GridFunction.constant(1, G)
        x = f.nodes[0]
        t = 0.3
        base = apply_operator(f, OperatorParams(1.5, (), (), 500), GAUSS)
        weighted = apply_operator(f, OperatorParams(1.5, (t,), (2,), 500), GAUSS)
        expected = base.values + (math.exp(t) - 1.0) * (2.0 + x) ** -3.0
        assert float(np.abs(weighted.values - expected).max()) < 1e-12

    def test_jp_markov_violation_detected(self, monkeypatch):
        # corrupt the branch table: swapped image coordinates leave the cell
        orig = spectral._jp_branch_image
        monkeypatch.setattr(
            spectral, "_jp_branch_image", lambda a, b, xi, eta: orig(a, b, xi, eta)[::-1]
        )
        f = GridFunction.constant(2, 16)
        with pytest.raises(MarkovViolationError):
            apply_operator(f, OperatorParams(1.0, (), (), 8), JP2)


class TestLeadingEigenvalue:
    def test_gauss_eigenvalue_one_full_resolution(self):
        res = leading_eigenvalue(OperatorParams(1.0, (), (), 10_000), GAUSS, G=4096)
        assert abs(res.eigenvalue - 1.0) < 1e-6
        assert res.residual < 1e-10
        assert (res.eigenfunction.values > 0).all()

    def test_heavier_weight_shrinks_eigenvalue(self):
        r1 = leading_eigenvalue(OperatorParams(1.0, (), (), 2048), GAUSS, G=256)
        r2 = leading_eigenvalue(OperatorParams(2.0, (), (), 2048), GAUSS, G=256)
        assert r2.eigenvalue < r1.eigenvalue < 1.001

    def test_monotone_in_s(self):
        vals = [
            leading_eigenvalue(OperatorParams(s, (), (), 1024), GAUSS, G=128).eigenvalue
            for s in (0.9, 1.0, 1.2, 1.5, 2.0)
        ]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_grid_convergence(self):
        lams = [
            leading_eigenvalue(OperatorParams(1.3, (), (), 1024), GAUSS, G=G).eigenvalue
            for G in (64, 128, 256)
        ]
        assert abs(lams[2] - lams[1]) < abs(lams[1] - lams[0])

    def test_tail_bar_shrinks_with_jmax(self):
        bars = [
            leading_eigenvalue(OperatorParams(1.0, (), (), jm), GAUSS, G=64).tail_bar
            for jm in (100, 200, 400)
        ]
        assert bars[0] > bars[1] > bars[2] > 0

    def test_brun_eigenvalue_and_density_shape(self):
        res = leading_eigenvalue(OperatorParams(1.0, (), (), 512), BRUN2, G=96)
        assert abs(res.eigenvalue - 1.0) < 5e-4
        f = res.eigenfunction
        x1, x2 = np.meshgrid(f.nodes[0], f.nodes[1], indexing="ij")
        ref = brun_density_m2(x1, x2)
        scale = f.values.mean() / ref.mean()
        assert float((np.abs(f.values - scale * ref) / (scale * ref)).max()) < 5e-2

    def test_jp_eigenvalue_near_one(self):
        res = leading_eigenvalue(OperatorParams(1.0, (), (), 32), JP2, G=32, tol=1e-10)
        assert abs(res.eigenvalue - 1.0) < 5e-3
        assert (res.eigenfunction.values > 0).all()

    def test_nonconvergence_reports_trace(self):
        with pytest.raises(ConvergenceError) as err:
            leading_eigenvalue(OperatorParams(1.0, (), (), 512), GAUSS, G=64, max_iter=2)
        assert len(err.value.trace) == 2


class TestInvariantDensity:
    def test_gauss_closed_form(self):
        f = invariant_density(GAUSS, G=512, j_max=4096)
        x = f.nodes[0]
        ref = gauss_density(x)
        assert float((np.abs(f.values - ref) / ref).max()) < 1e-4
        assert f.values[0] == pytest.approx(1.0 / math.log(2.0), rel=1e-3)

    def test_unit_integral(self):
        f = invariant_density(GAUSS, G=256, j_max=1024)
        assert f.values.mean() == pytest.approx(1.0, abs=1e-12)


class TestDerivatives:
    def test_entropy_and_frequencies(self, coarse_gauss_deriv):
        d = coarse_gauss_deriv
        assert -d.lambda_s == pytest.approx(math.pi**2 / (6 * math.log(2)), abs=1e-4)
        # raw t-gradient equals the invariant measure of the digit cells
        mu1 = math.log(4.0 / 3.0) / math.log(2.0)
        mu2 = math.log(9.0 / 8.0) / math.log(2.0)
        assert d.lambda_t_raw[0] == pytest.approx(mu1, abs=1e-5)
        assert d.lambda_t_raw[1] == pytest.approx(mu2, abs=1e-5)
        lam = frequency_constants(GAUSS, (1, 2), deriv=d)
        assert lam[0] == pytest.approx(6 / math.pi**2 * math.log(4.0 / 3.0), abs=1e-5)
        assert (lam > 0).all()

    def test_centred_gradient_vanishes(self, coarse_gauss_deriv):
        assert np.abs(coarse_gauss_deriv.lambda_t_centred).max() < 1e-4

    def test_covariance_positive_definite(self, coarse_gauss_deriv):
        sig = covariance_matrix(GAUSS, (1, 2), deriv=coarse_gauss_deriv)
        assert np.array_equal(sig, sig.T)
        assert np.linalg.eigvalsh(sig).min() > 0
        assert sig[0, 0] > 0

    def test_absent_target_frequency_zero(self):
        d = eigenvalue_derivatives(GAUSS, targets=(1, 10**7), G=64, j_max=512)
        lam = frequency_constants(GAUSS, (1, 10**7), j_max=512, deriv=d)
        assert lam[1] == 0.0
        assert lam[0] > 0

    def test_representable_target_beyond_cap_rejected(self):
        f = GridFunction.constant(1, 32)
        with pytest.raises(ValueError):
            apply_operator(f, OperatorParams(1.0, (0.1,), (2000,), 5000), GAUSS)


class TestWitnesses:
    def test_gauss_constants(self):
        w = nonarithmeticity_witnesses(GAUSS)
        assert w.values[0] == pytest.approx(-2 * math.log((1 + math.sqrt(5)) / 2), abs=1e-12)
        assert w.values[1] == pytest.approx(-2 * math.log(1 + math.sqrt(2)), abs=1e-12)
        assert w.values[0] == pytest.approx(-0.9624236501, abs=1e-9)
        assert w.values[1] == pytest.approx(-1.7627471740, abs=1e-9)
        assert len(w.ratio_cf) == 20

    def test_brun_roots(self):
        w = nonarithmeticity_witnesses(BRUN2)
        tau, rho = w.fixed_points
        assert tau == pytest.approx(0.6823278, abs=1e-6)
        assert abs(tau**3 + tau - 1) < 1e-12
        assert abs(rho**3 + 2 * rho - 1) < 1e-12

    def test_jp_not_supported(self):
        with pytest.raises(ValueError):
            nonarithmeticity_witnesses(JP2)


class TestClosedFormDensities:
    def test_gauss_density_at_zero(self):
        assert gauss_density(0.0) == pytest.approx(1.0 / math.log(2.0), rel=1e-15)

    def test_brun_density_at_origin(self):
        # both permutations contribute 1 at the origin
        assert brun_density_m2(0.0, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_brun_density_symmetric(self):
        assert brun_density_m2(0.3, 0.7) == pytest.approx(brun_density_m2(0.7, 0.3), rel=1e-15)
