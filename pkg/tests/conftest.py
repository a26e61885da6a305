from fractions import Fraction

import pytest

from cfstats.maps import GAUSS


@pytest.fixture(scope="session")
def gauss_small_table():
    from cfstats.bulk import gauss_ensemble_table

    return gauss_ensemble_table(300, targets=(1, 2))


@pytest.fixture(scope="session")
def coarse_gauss_deriv():
    from cfstats.spectral import eigenvalue_derivatives

    return eigenvalue_derivatives(GAUSS, targets=(1, 2), G=256, j_max=2048)


def rational_grid(m, denominator=7):
    """Deterministic interior sample points of [0,1]^m as Fractions."""
    from itertools import product

    vals = [Fraction(k, denominator) for k in range(1, denominator)]
    return list(product(vals, repeat=m))
