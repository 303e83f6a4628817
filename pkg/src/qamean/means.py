"""Weighted quasi-arithmetic means M_f(a, w) = f^-1(sum w_i f(a_i))."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import Interval
from .errors import DomainError, InvalidParameterError, MeanOverflowError
from .generators import INCREASING, Generator, invert

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightedSample:
    entries: tuple
    weights: tuple

    def __post_init__(self):
        entries = tuple(float(a) for a in self.entries)
        weights = tuple(float(w) for w in self.weights)
        if len(entries) == 0:
            raise InvalidParameterError("sample needs at least one entry")
        if len(entries) != len(weights):
            raise InvalidParameterError("entries and weights differ in length")
        if any(not (w > 0) or not math.isfinite(w) for w in weights):
            raise InvalidParameterError("weights must be positive and finite")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidParameterError(f"weights sum to {math.fsum(weights)!r}, not 1")
        if any(not math.isfinite(a) for a in entries):
            raise InvalidParameterError("entries must be finite")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def normalized(cls, entries: Sequence[float], weights: Sequence[float]) -> "WeightedSample":
        total = math.fsum(weights)
        return cls(tuple(entries), tuple(w / total for w in weights))

    @classmethod
    def uniform(cls, entries: Sequence[float]) -> "WeightedSample":
        r = len(entries)
        return cls(tuple(entries), (1.0 / r,) * r)


@dataclass(frozen=True)
class TwoPointQuery:
    x: float
    z: float
    xi: float

    def __post_init__(self):
        if not (0.0 < self.xi < 1.0):
            raise InvalidParameterError(f"xi must lie in (0, 1), got {self.xi!r}")

    def to_dict(self) -> dict:
        return {"x": self.x, "z": self.z, "xi": self.xi}


def qa_mean(g: Generator, s: WeightedSample) -> float:
    """f^-1(sum_i w_i f(a_i)), inverted on [min a, max a].

    The weighted sum is accumulated with ``math.fsum`` (exactly rounded), which
    also makes the value invariant under joint permutation of entries and weights.
    """
    lo, hi = min(s.entries), max(s.entries)
    for a in (lo, hi):
        if not g.domain.contains(a):
            raise DomainError(f"entry {a!r} lies outside the generator domain {g.domain}")
    if lo == hi:
        return lo
    with np.errstate(over="ignore", invalid="ignore"):
        values = [float(g.eval(a)) for a in s.entries]
    for a, v in zip(s.entries, values):
        if not math.isfinite(v):
            raise MeanOverflowError(a)
    target = math.fsum(w * v for w, v in zip(s.weights, values))
    if not math.isfinite(target):
        raise MeanOverflowError(s.entries[int(np.argmax(np.abs(values)))])

    # rounding can push the target a hair outside f([lo, hi])
    f_lo, f_hi = values[s.entries.index(lo)], values[s.entries.index(hi)]
    if g.direction == INCREASING:
        if target <= f_lo:
            return lo
        if target >= f_hi:
            return hi
    else:
        if target >= f_lo:
            return lo
        if target <= f_hi:
            return hi
    return invert(g, target, Interval(lo, hi))


def qa_mean_two(g: Generator, q: TwoPointQuery) -> float:
    """M_f(x, z, xi) = f^-1(xi f(x) + (1 - xi) f(z))."""
    if q.x == q.z:
        return float(q.x)
    return qa_mean(g, WeightedSample((q.x, q.z), (q.xi, 1.0 - q.xi)))


def power_mean_closed_form(p: float, s: WeightedSample) -> float:
    """(sum w_i a_i**p)**(1/p), evaluated as exp(logsumexp(p log a_i + log w_i) / p)."""
    if p == 0:
        raise InvalidParameterError("power mean exponent must be nonzero")
    a = np.asarray(s.entries, dtype=float)
    if np.any(a <= 0):
        raise DomainError("power mean needs positive entries")
    terms = p * np.log(a) + np.log(np.asarray(s.weights))
    top = np.max(terms)
    lse = top + math.log(math.fsum(np.exp(terms - top)))
    return float(np.clip(math.exp(lse / p), a.min(), a.max()))
