import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qamean import (
    ArrowProfile,
    Interval,
    OrderingVerdict,
    TwoPointQuery,
    affine_fit,
    affine_transform,
    arrow_operator,
    builtin_generator,
    compare_generators,
    generator_from_arrow,
    qa_mean_two,
)
from qamean.comparison import EQUAL_AFFINE, F_LE_G, G_LE_F, INCOMPARABLE
from qamean.errors import InvalidParameterError

U12 = Interval(1, 2)
GRID = np.linspace(1, 2, 101)


def test_arrow_examples():
    assert arrow_operator(builtin_generator("identity", [], Interval(0, 1)), 0.3) == 0
    assert arrow_operator(builtin_generator("exp", [3], Interval(0, 1)), 0.3) == pytest.approx(3)
    assert arrow_operator(builtin_generator("power", [3], U12), 1.5) == pytest.approx(2 / 1.5)
    assert arrow_operator(builtin_generator("log", [], U12), 1.25) == pytest.approx(-0.8)


def test_compare_examples():
    sq, cube = builtin_generator("power", [2], U12), builtin_generator("power", [3], U12)
    assert compare_generators(sq, cube, GRID).relation == F_LE_G
    assert compare_generators(cube, sq, GRID).relation == G_LE_F
    assert compare_generators(sq, affine_transform(sq, 5, -2), GRID).relation == EQUAL_AFFINE


def test_compare_incomparable_witness():
    U = Interval(0, 1)
    f = generator_from_arrow(ArrowProfile.from_knots([(0, -1.0), (1, 1.0)]), 0.5)
    g = builtin_generator("identity", [], U)
    grid = np.linspace(0, 1, 41)
    v = compare_generators(f, g, grid)
    assert v.relation == INCOMPARABLE
    above, below = v.witness
    assert f.arrow(above) > g.arrow(above) and f.arrow(below) < g.arrow(below)


def test_verdict_witness_contract():
    with pytest.raises(InvalidParameterError):
        OrderingVerdict(INCOMPARABLE)
    with pytest.raises(InvalidParameterError):
        OrderingVerdict(F_LE_G, witness=(0.1, 0.2))


def test_affine_fit():
    sq = builtin_generator("power", [2], U12)
    fit = affine_fit(affine_transform(sq, 3, -1), sq, GRID)
    assert fit == pytest.approx((3, -1), rel=1e-9)
    assert affine_fit(builtin_generator("power", [3], U12), sq, GRID) is None
    with pytest.raises(InvalidParameterError):
        affine_fit(sq, sq, [1, 2])


@given(st.floats(1, 2), st.floats(1, 2), st.floats(0.01, 0.99))
@settings(max_examples=200, deadline=None)
def test_ordering_implies_mean_ordering(x, z, xi):
    # A_{x^2} <= A_{x^3} pointwise, so the x^2 mean never exceeds the x^3 mean
    sq, cube = builtin_generator("power", [2], U12), builtin_generator("power", [3], U12)
    q = TwoPointQuery(x, z, xi)
    assert qa_mean_two(sq, q) <= qa_mean_two(cube, q) + 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=50, deadline=None)
def test_exp_ordering_follows_rate(s, t):
    U = Interval(0, 1)
    if s == 0 or t == 0:
        return
    v = compare_generators(builtin_generator("exp", [s], U), builtin_generator("exp", [t], U), np.linspace(0, 1, 11))
    expected = EQUAL_AFFINE if abs(s - t) <= 1e-10 else (F_LE_G if s < t else G_LE_F)
    assert v.relation == expected
