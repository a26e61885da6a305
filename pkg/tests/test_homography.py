import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cfstats.homography import Homography
from cfstats.maps import GAUSS, BRUN2, JP2, GaussDigit, BrunDigit, JPDigit


def gauss_matrix(j):
    return Homography(((0, 1), (1, j)))


def test_identity_compose():
    h = gauss_matrix(3)
    ident = Homography.identity(1)
    assert ident.compose(h) == h
    assert h.compose(ident) == h


def test_gauss_depth_two_matrix():
    h = gauss_matrix(2).compose(gauss_matrix(2))
    assert h.rows == ((1, 2), (2, 5))
    assert h.apply((Fraction(0),)) == (Fraction(2, 5),)


def test_det_and_unimodularity():
    assert gauss_matrix(7).det() == -1
    assert gauss_matrix(7).is_unimodular()
    assert Homography(((2, 0), (0, 1))).det() == 2
    assert not Homography(((2, 0), (0, 1))).is_unimodular()


def test_log_jacobian_gauss_example():
    h = Homography(((1, 2), (2, 5)))
    assert h.log_jacobian((0.0,)) == pytest.approx(-2 * math.log(5), abs=1e-14)
    assert h.weight_at((0.0,)) == pytest.approx(2 * math.log(5), abs=1e-14)


def test_denominator_must_be_positive():
    h = Homography(((0, 1), (1, -3)))
    with pytest.raises(ValueError):
        h.apply((Fraction(1, 2),))


@given(st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=10))
def test_unimodularity_preserved_under_composition(js):
    h = Homography.identity(1)
    for j in js:
        h = h.compose(gauss_matrix(j))
    assert abs(h.det()) == 1


@given(
    st.lists(
        st.tuples(st.integers(min_value=0, max_value=5), st.integers(min_value=1, max_value=6)),
        min_size=1,
        max_size=8,
    )
)
def test_jp_composition_matches_function_composition(pairs):
    pairs = [(min(a, b), b) for a, b in pairs]
    hs = [JP2.inverse_branch(JPDigit(a, b)) for a, b in pairs]
    composed = Homography.identity(2)
    for h in hs:
        composed = composed.compose(h)
    x = (Fraction(1, 3), Fraction(2, 7))
    y = x
    for h in reversed(hs):
        y = h.apply(y)
    assert composed.apply(x) == y
    assert abs(composed.det()) == 1


def test_jp_depth_two_corner_denominator():
    # the origin image of a depth-2 composition is a rational pair whose
    # common denominator is the bottom-right matrix entry
    for b1 in range(1, 6):
        for a1 in range(0, b1 + 1):
            for b2 in range(2, 6):
                for a2 in range(0, b2 + 1):
                    h = JP2.inverse_branch(JPDigit(a1, b1)).compose(
                        JP2.inverse_branch(JPDigit(a2, b2))
                    )
                    pt = h.apply_to_origin()
                    q = h.corner_denominator()
                    assert all(v.denominator <= q and q % v.denominator == 0 for v in pt)
                    assert h.apply((Fraction(0), Fraction(0))) == pt


def test_brun_branch_matrices_unimodular_all_positions():
    for m in (2, 3, 4):
        desc = __import__("cfstats.maps", fromlist=["brun"]).brun(m)
        for i in range(1, m + 1):
            for j in (1, 2, 5):
                h = desc.inverse_branch(BrunDigit(i, j))
                assert abs(h.det()) == 1
