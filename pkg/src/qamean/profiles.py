"""Continuous piecewise-linear Arrow profiles x -> A(x).

A profile is stored as its knots; constant and affine segments are the pieces
between consecutive knots. Storing knots (rather than independent segments)
makes continuity across piece boundaries automatic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .domain import Interval
from .errors import InvalidParameterError


@dataclass(frozen=True, eq=False)
class ArrowProfile:
    xs: np.ndarray
    values: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if xs.ndim != 1 or xs.shape != values.shape or xs.size < 2:
            raise InvalidParameterError("profile needs at least two knots with matching values")
        if not np.all(np.diff(xs) > 0):
            raise InvalidParameterError("profile knots must be strictly increasing")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(values))):
            raise InvalidParameterError("profile knots must be finite")
        xs.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", values)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(xs))))
        cum.flags.writeable = False
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def constant(cls, domain: Interval, value: float) -> "ArrowProfile":
        return cls(np.array([domain.lo, domain.hi]), np.array([value, value], dtype=float))

    @classmethod
    def from_knots(cls, knots: Iterable[tuple[float, float]]) -> "ArrowProfile":
        pts = list(knots)
        return cls(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))

    @property
    def domain(self) -> Interval:
        return Interval(self.xs[0], self.xs[-1])

    @property
    def pieces(self) -> list[tuple[Interval, tuple[float, float]]]:
        """(subinterval, (value at left end, value at right end)) per segment."""
        return [
            (Interval(a, b), (float(va), float(vb)))
            for a, b, va, vb in zip(self.xs[:-1], self.xs[1:], self.values[:-1], self.values[1:])
        ]

    def __call__(self, x):
        return np.interp(x, self.xs, self.values)

    def _locate(self, x):
        k = np.searchsorted(self.xs, x, side="right") - 1
        return np.clip(k, 0, self.xs.size - 2)

    def primitive(self, x):
        """Exact integral of the profile from the left end of its domain to x."""
        x = np.asarray(x, dtype=float)
        k = self._locate(x)
        x0, a0 = self.xs[k], self.values[k]
        slope = (self.values[k + 1] - a0) / (self.xs[k + 1] - x0)
        d = x - x0
        out = self._cum[k] + a0 * d + 0.5 * slope * d * d
        return out if out.ndim else float(out)

    def integral(self, a: float, b: float) -> float:
        return float(self.primitive(b) - self.primitive(a))

    def l1_norm(self, a: float | None = None, b: float | None = None) -> float:
        """Exact integral of |A| over [a, b] (defaults to the whole domain)."""
        a = self.xs[0] if a is None else a
        b = self.xs[-1] if b is None else b
        inner = self.xs[(self.xs > a) & (self.xs < b)]
        pts = np.concatenate(([a], inner, [b]))
        va = self(pts)
        total = 0.0
        for x0, x1, v0, v1 in zip(pts[:-1], pts[1:], va[:-1], va[1:]):
            h = x1 - x0
            if v0 * v1 >= 0:
                total += 0.5 * (abs(v0) + abs(v1)) * h
            else:
                # segment crosses zero
                t = v0 / (v0 - v1)
                total += 0.5 * (abs(v0) * t + abs(v1) * (1 - t)) * h
        return float(total)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def reflected(self) -> "ArrowProfile":
        """Profile of x -> f(-x): A_g(u) = -A_f(-u)."""
        return ArrowProfile(-self.xs[::-1], -self.values[::-1])

    def clipped(self, domain: Interval) -> "ArrowProfile":
        inner = self.xs[(self.xs > domain.lo) & (self.xs < domain.hi)]
        xs = np.concatenate(([domain.lo], inner, [domain.hi]))
        return ArrowProfile(xs, self(xs))

    def to_knots(self) -> list[dict]:
        return [{"x": float(x), "a": float(a)} for x, a in zip(self.xs, self.values)]

    def __repr__(self):
        return f"ArrowProfile(knots={self.xs.size}, domain=[{self.xs[0]}, {self.xs[-1]}])"


def sum_profiles(profiles: Sequence[ArrowProfile], domain: Interval | None = None) -> ArrowProfile:
    """Pointwise sum on the union of knots; all inputs are clipped to ``domain``."""
    if not profiles:
        raise InvalidParameterError("need at least one profile to sum")
    domain = domain or profiles[0].domain
    xs = np.unique(np.concatenate([p.xs for p in profiles] + [np.array([domain.lo, domain.hi])]))
    xs = xs[(xs >= domain.lo) & (xs <= domain.hi)]
    values = np.zeros_like(xs)
    for p in profiles:
        values += p(xs)
    return ArrowProfile(xs, values)


def cumulative_sums(profiles: Sequence[ArrowProfile], domain: Interval) -> list[ArrowProfile]:
    """[p1, p1+p2, p1+p2+p3, ...] evaluated on a growing union of knots."""
    out = []
    xs = np.array([domain.lo, domain.hi])
    values = np.zeros(2)
    for p in profiles:
        new_xs = np.unique(np.concatenate((xs, p.xs[(p.xs >= domain.lo) & (p.xs <= domain.hi)])))
        values = np.interp(new_xs, xs, values) + p(new_xs)
        xs = new_xs
        out.append(ArrowProfile(xs, values))
    return out
