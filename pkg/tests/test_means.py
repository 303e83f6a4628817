import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from qamean import (
    Interval,
    TwoPointQuery,
    WeightedSample,
    affine_transform,
    builtin_generator,
    power_mean_closed_form,
    qa_mean,
    qa_mean_two,
)
from qamean.errors import DomainError, InvalidParameterError, MeanOverflowError

from conftest import random_builtin

POS = Interval(0.1, 10)


def mp_power_mean(p, entries, weights):
    mpmath.mp.dps = 40
    s = mpmath.fsum(mpmath.mpf(w) * mpmath.mpf(a) ** p for a, w in zip(entries, weights))
    return float(s ** (mpmath.mpf(1) / p))


def test_mean_examples():
    ident = builtin_generator("identity", [], Interval(0, 10))
    s = WeightedSample((1, 2, 3), (1 / 3, 1 / 3, 1 / 3))
    assert qa_mean(ident, s) == pytest.approx(2, abs=1e-12)
    lg = builtin_generator("log", [], Interval(0.5, 10))
    assert qa_mean(lg, WeightedSample((1, 4), (0.5, 0.5))) == pytest.approx(2, abs=1e-12)
    sq = builtin_generator("power", [2], Interval(1, 10))
    assert qa_mean(sq, WeightedSample((3, 4), (0.5, 0.5))) == pytest.approx(math.sqrt(12.5), abs=1e-12)


def test_power_ten_two_point_value():
    g = builtin_generator("power", [10], Interval(1, 2))
    m = qa_mean_two(g, TwoPointQuery(1, 2, 0.5))
    assert m == pytest.approx(((1 + 2**10) / 2) ** 0.1, rel=1e-12)
    assert m >= 1.866


def test_weighted_sample_validation():
    with pytest.raises(InvalidParameterError):
        WeightedSample((1, 2), (0.5, 0.6))
    with pytest.raises(InvalidParameterError):
        WeightedSample((1, 2), (1.0, 0.0))
    with pytest.raises(InvalidParameterError):
        WeightedSample((), ())
    with pytest.raises(InvalidParameterError):
        WeightedSample((1, 2, 3), (0.5, 0.5))
    s = WeightedSample.normalized((1, 2), (2, 6))
    assert s.weights == (0.25, 0.75)


def test_query_validation():
    with pytest.raises(InvalidParameterError):
        TwoPointQuery(0, 1, 1.0)
    with pytest.raises(InvalidParameterError):
        TwoPointQuery(0, 1, 0.0)


def test_domain_and_overflow_errors():
    lg = builtin_generator("log", [], Interval(0.5, 10))
    with pytest.raises(DomainError):
        qa_mean(lg, WeightedSample((0.1, 4), (0.5, 0.5)))
    e = builtin_generator("exp", [1000], Interval(0, 1))
    with pytest.raises(MeanOverflowError) as info:
        qa_mean(e, WeightedSample((0.2, 0.9), (0.5, 0.5)))
    assert info.value.entry == 0.9


def test_power_mean_closed_form_oracle(rng):
    for p in (-2, -1, 0.5, 1, 2, 3, 10):
        for _ in range(30):
            r = int(rng.integers(1, 7))
            a = rng.uniform(0.1, 10, r)
            w = rng.dirichlet(np.ones(r))
            s = WeightedSample.normalized(a, w)
            assert power_mean_closed_form(p, s) == pytest.approx(mp_power_mean(p, s.entries, s.weights), rel=1e-12)


def test_power_generator_matches_high_precision(rng):
    for p in (-2, -1, 0.5, 2, 3, 10):
        g = builtin_generator("power", [p], POS)
        for _ in range(30):
            r = int(rng.integers(1, 7))
            s = WeightedSample.normalized(rng.uniform(0.1, 10, r), rng.dirichlet(np.ones(r)))
            assert qa_mean(g, s) == pytest.approx(mp_power_mean(p, s.entries, s.weights), rel=1e-9)


def test_decreasing_generator_mean():
    # 1/x generates the harmonic mean
    g = builtin_generator("power", [-1], POS)
    assert qa_mean(g, WeightedSample((1, 4), (0.5, 0.5))) == pytest.approx(1.6, rel=1e-13)


def test_single_entry_and_repeated_entries():
    g = builtin_generator("exp", [3], Interval(0, 1))
    assert qa_mean(g, WeightedSample((0.7,), (1.0,))) == 0.7
    assert qa_mean(g, WeightedSample((0.4, 0.4, 0.4), (0.2, 0.3, 0.5))) == 0.4


samples = st.integers(1, 6).flatmap(
    lambda r: st.tuples(
        st.lists(st.floats(0.1, 10), min_size=r, max_size=r),
        st.lists(st.floats(0.01, 1), min_size=r, max_size=r),
    )
)


@given(samples, st.sampled_from(["identity", "log", "power:2", "power:-1", "exp:0.5", "exp:-1"]),
       st.randoms(use_true_random=False))
@settings(max_examples=300, deadline=None)
def test_internality_and_permutation(sample, spec, rnd):
    kind, _, param = spec.partition(":")
    g = builtin_generator(kind, [float(param)] if param else [], POS)
    entries, raw_w = sample
    s = WeightedSample.normalized(entries, raw_w)
    m = qa_mean(g, s)
    assert min(entries) <= m <= max(entries)
    order = list(range(len(entries)))
    rnd.shuffle(order)
    perm = WeightedSample(tuple(s.entries[i] for i in order), tuple(s.weights[i] for i in order))
    assert qa_mean(g, perm) == m


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.01, 0.99),
       st.sampled_from(["log", "power:3", "exp:-2", "exp:1"]))
@settings(max_examples=300, deadline=None)
def test_two_point_symmetry(x, z, xi, spec):
    kind, _, param = spec.partition(":")
    g = builtin_generator(kind, [float(param)] if param else [], POS)
    a = qa_mean_two(g, TwoPointQuery(x, z, xi))
    b = qa_mean_two(g, TwoPointQuery(z, x, 1 - xi))
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.05, 0.95),
       st.floats(0.1, 10) | st.floats(-10, -0.1), st.floats(-50, 50))
@settings(max_examples=200, deadline=None)
def test_affine_invariance(x, z, xi, alpha, beta):
    assume(abs(x - z) > 1e-6)
    g = builtin_generator("power", [3], POS)
    q = TwoPointQuery(x, z, xi)
    a, b = qa_mean_two(g, q), qa_mean_two(affine_transform(g, alpha, beta), q)
    assert abs(a - b) <= 1e-9 * abs(x - z)


def test_random_generators_stay_internal(rng):
    for _ in range(200):
        g = random_builtin(rng)
        r = int(rng.integers(2, 7))
        s = WeightedSample.normalized(rng.uniform(0.1, 10, r), rng.dirichlet(np.ones(r)))
        m = qa_mean(g, s)
        assert min(s.entries) <= m <= max(s.entries)
