import math

import numpy as np
import pytest
from scipy.integrate import quad

from qamean import (
    BumpSpec,
    Interval,
    NGrid,
    TargetSetSpec,
    TrendConfig,
    TwoPointQuery,
    build_prop51_family,
    build_prop53_family,
    covering_bound,
    derivative_ratio_test,
    integral_test,
    obstruction_level,
    qa_mean_two,
    rational_enumeration,
    ratio_test,
    x_infinity_estimate,
)
from qamean.constructions import cantor_intervals, covering_sum, merge_intervals, rational_fractions
from qamean.diagnostics import CONVERGES, DIVERGES, max_derivative_ratio
from qamean.errors import ConstructionInfeasibleError, InvalidParameterError

U = Interval(0, 1)


def quad_l1(profile, a, b):
    pts = [x for x in profile.xs if a < x < b]
    # one quad call per linear piece keeps scipy away from the kinks
    edges = [a] + pts + [b]
    return math.fsum(quad(lambda t: abs(float(profile(t))), lo, hi, epsabs=1e-14)[0]
                     for lo, hi in zip(edges[:-1], edges[1:]))


@pytest.fixture(scope="module")
def prop51():
    return build_prop51_family(TargetSetSpec.midpoint(U), 0.1, U, n_max=64)


@pytest.fixture(scope="module")
def prop53():
    return build_prop53_family(U, 64)


# --- helpers ---------------------------------------------------------------------


def test_merge_intervals():
    assert merge_intervals([(0.3, 0.5), (0.1, 0.2), (0.45, 0.6)]) == [(0.1, 0.2), (0.3, 0.6)]


def test_cantor_intervals():
    ivs = cantor_intervals(2, U)
    assert ivs == pytest.approx([(0, 1 / 9), (2 / 9, 1 / 3), (2 / 3, 7 / 9), (8 / 9, 1)])
    assert len(cantor_intervals(5, U)) == 32
    assert math.fsum(b - a for a, b in cantor_intervals(5, U)) == pytest.approx((2 / 3) ** 5)


def test_target_specs():
    assert TargetSetSpec.midpoint(U).points == (0.5,)
    assert len(TargetSetSpec.cantor(3, U).points) == 16
    with pytest.raises(InvalidParameterError):
        TargetSetSpec("finite-points", U, (2.0,))
    with pytest.raises(InvalidParameterError):
        TargetSetSpec("fractal", U)


def test_bump_profile_shape():
    b = BumpSpec(((0.4, 0.45), (0.5, 0.55)), ((0.3, 0.6),), 2.0)
    p = b.profile(U)
    assert p(0.3) == 0 and p(0.6) == 0 and p(0.2) == 0
    assert p(0.4) == 2 and p(0.47) == 2 and p(0.55) == 2
    assert p(0.35) == pytest.approx(1.0)
    assert p.l1_norm() == pytest.approx(quad_l1(p, 0, 1), abs=1e-10)
    with pytest.raises(InvalidParameterError):
        BumpSpec(((0.2, 0.7),), ((0.3, 0.6),), 1.0)


# --- rationals and covering ------------------------------------------------------


def test_rational_examples():
    assert rational_enumeration(U, 3) == [0.5, 1 / 3, 2 / 3]
    assert rational_enumeration(U, 1) == [0.5]
    fr = rational_fractions(U, 100)
    assert len(set(fr)) == 100 and all(0 < f < 1 for f in fr)
    assert rational_fractions(Interval(1, 2), 2) == [pytest.approx(1.5), pytest.approx(4 / 3)]


def test_covering_examples():
    assert covering_bound(0.5, 10) == pytest.approx(0.6828, abs=1e-4)
    for d in (0.25, 0.5, 1.0):
        for n in (1, 10, 100):
            assert covering_sum(d, n) <= covering_bound(d, n)
    with pytest.raises(InvalidParameterError):
        covering_bound(0, 3)


# --- non-max construction --------------------------------------------------------


def test_prop51_certificate(prop51):
    fam, cert = prop51
    eps = cert.data["eps"]
    assert max(cert.profile_l1) < eps
    for c, b, floored in zip(cert.data["cover_lengths"], cert.data["cover_bounds"], cert.data["radius_floored"]):
        # floored radii sit at float resolution and are reported rather than hidden
        assert floored or c < b
    assert math.fsum(c for c, f in zip(cert.data["cover_lengths"], cert.data["radius_floored"]) if f) < 1e-9
    # the target value grows like n, as the construction intends
    assert [v[0] for v in cert.data["values_on_target"]] == [float(n) for n in range(1, 65)]
    for n in (1, 5, 20, 64):
        prof = fam.profiles(n)
        assert abs(cert.profile_l1[n - 1] - quad_l1(prof, 0, 1)) <= 1e-8
        assert np.all(prof.values >= 0)


def test_prop51_derivative_ratio_stays_below_eps(prop51):
    fam, cert = prop51
    ns = NGrid.range(1, 64)
    for p, q in [(0.1, 0.9), (0.45, 0.55), (0.0, 0.5)]:
        r = derivative_ratio_test(fam, p, q, ns)
        assert max(r.values) <= cert.data["eps"]
        assert r.verdict.classification != DIVERGES
    for n in (8, 64):
        assert max_derivative_ratio(fam.at(n), 0.0, 1.0) <= cert.data["eps"]


def test_prop51_generators_strictly_increasing(prop51):
    fam, _ = prop51
    grid = np.linspace(0, 1, 4001)
    for n in (1, 10, 64):
        assert np.all(np.diff(fam.at(n).eval(grid)) > 0)


def test_prop51_mean_stays_below_level(prop51):
    fam, cert = prop51
    x, z, xi = 0.1, 0.9, 0.5
    ystar = obstruction_level(x, z, xi, math.exp(cert.data["eps"]))
    y = 0.5 * (ystar + z)
    for n in range(1, 65):
        m = qa_mean_two(fam.at(n), TwoPointQuery(x, z, xi))
        assert m < y < z


def test_prop51_cantor_flags_near_target():
    base = Interval(0.25, 0.75)
    V = TargetSetSpec.cantor(5, base)
    eps = 0.1
    fam, cert = build_prop51_family(V, eps, U, n_max=48)
    assert max(cert.profile_l1) < eps
    grid = np.union1d(np.linspace(0, 1, 201), V.points)
    est = x_infinity_estimate(fam, grid, NGrid.range(1, 48), 30)
    assert est.members
    assert set(V.points) <= set(est.members)
    for x in est.members:
        assert min(abs(x - v) for v in V.points) < eps


def test_prop51_infeasible():
    with pytest.raises(ConstructionInfeasibleError):
        build_prop51_family(TargetSetSpec("finite-points", U, (0.001,)), 0.5, U)
    with pytest.raises(InvalidParameterError):
        build_prop51_family(TargetSetSpec.midpoint(U), -1, U)


# --- max construction ------------------------------------------------------------


def test_prop53_certificate(prop53):
    fam, cert = prop53
    d = cert.data
    assert d["k0"] == 2 and d["centre"] == 0.5
    ints = d["query_integrals"]
    assert all(b > a for a, b in zip(ints, ints[1:]))
    for n, v in enumerate(ints, 1):
        if n > d["k0"]:
            assert v > d["predicted_lower_bounds"][n - 1]
    for n in (1, 7, 30):
        prof = fam.profiles(n)
        assert abs(cert.profile_l1[n - 1] - quad_l1(prof, 0, 1)) <= 1e-8
        assert abs(ints[n - 1] - quad_l1(prof, 0.2, 0.8)) <= 1e-8
        assert np.all(prof.values >= 0)


@pytest.mark.parametrize("p,q", [(0.2, 0.8), (0.05, 0.95), (0.4, 0.7), (0.1, 0.3), (0.6, 0.9)])
def test_prop53_derivative_criteria(prop53, p, q):
    fam, _ = prop53
    ns = NGrid.range(1, 64)
    d = derivative_ratio_test(fam, p, q, ns)
    i = integral_test(fam, p, q, ns)
    assert d.verdict.classification == DIVERGES
    assert i.verdict.classification == DIVERGES
    assert i.extras["cross_check"] <= 1e-8


@pytest.mark.parametrize("x,y,z", [(0.2, 0.5, 0.8), (0.05, 0.5, 0.95), (0.4, 0.55, 0.7),
                                   (0.1, 0.2, 0.3), (0.6, 0.65, 0.9)])
def test_prop53_ratio_criterion(prop53, x, y, z):
    fam, _ = prop53
    r = ratio_test(fam, x, y, z, NGrid.range(1, 64))
    assert r.verdict.classification == CONVERGES


def test_prop53_flags_rational_centres(prop53):
    fam, cert = prop53
    centres = cert.data["rationals"][:64]
    grid = np.union1d(np.linspace(0, 1, 41), centres)
    est = x_infinity_estimate(fam, grid, NGrid.range(1, 64), 1000)
    members = set(est.members)
    assert all(q in members for q in centres)
    # grid points on the regular lattice that are rational centres are included too
    on_lattice = [q for q in centres if q in set(np.linspace(0, 1, 41))]
    assert all(q in members for q in on_lattice)


def test_prop53_generators_strictly_increasing(prop53):
    fam, _ = prop53
    grid = np.linspace(0, 1, 2001)
    for n in (1, 16, 40):
        g = fam.at(n)
        assert np.all(np.isfinite(g.log_deriv1(grid)))
        assert np.all(g.deriv1(grid) > 0)
        # for large n, f' spans ~e^90 and f stalls at float resolution near 0
        steps = np.diff(g.eval(grid))
        assert np.all(steps > 0) if n <= 16 else np.all(steps >= 0)


def test_prop53_validation():
    with pytest.raises(InvalidParameterError):
        build_prop53_family(U, 0)
    with pytest.raises(InvalidParameterError):
        build_prop53_family(U, 5, rational_count=3)
