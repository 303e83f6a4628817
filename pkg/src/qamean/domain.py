from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class Interval:
    """Finite interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (lo < hi) or lo != lo or hi != hi:
            raise InvalidParameterError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")
        if abs(lo) == float("inf") or abs(hi) == float("inf"):
            raise InvalidParameterError("interval endpoints must be finite")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, strict: bool = False) -> bool:
        if strict:
            return self.lo < x < self.hi
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def reflected(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo < hi else None

    def grid(self, count: int, margin: float = 0.0):
        import numpy as np

        return np.linspace(self.lo + margin, self.hi - margin, count)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}
