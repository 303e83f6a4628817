import numpy as np
import pytest

from qamean import Interval, builtin_family, builtin_generator


@pytest.fixture
def rng():
    return np.random.default_rng(20131017)


@pytest.fixture
def exp_seq():
    return builtin_family("exp-seq", (), Interval(0, 1))


@pytest.fixture
def power_seq():
    return builtin_family("power-seq", (), Interval(1, 2))


@pytest.fixture
def identity_family():
    return builtin_family("constant", ("identity",), Interval(0, 1))


def random_builtin(rng, domain=Interval(0.1, 10)):
    """A random closed-form generator on a positive domain."""
    kind = rng.choice(["identity", "log", "power", "exp"])
    if kind == "power":
        return builtin_generator("power", [rng.choice([-2, -1, -0.5, 0.5, 1, 2, 3])], domain)
    if kind == "exp":
        return builtin_generator("exp", [rng.choice([-1.0, -0.3, 0.5, 1.0, 2.0])], domain)
    return builtin_generator(kind, [], domain)
