"""Arrow-profile families built from sums of trapezoid bumps.

Two constructions are provided:

* ``build_prop51_family`` -- bumps s_k of height 1 on shrinking covers of a
  small target set V. A_{f_n} = s_1 + ... + s_n blows up on V yet its L1 norm
  stays below eps, so the family is *not* a max-family.
* ``build_prop53_family`` -- bumps c_k of height k^2 on tiny balls around the
  first k rationals. A_{f_n} = c_1 + ... + c_n has integrals diverging on every
  subinterval (a max-family) while blowing up only on a very thin set.

Continuous extensions between plateau and zero are realised as linear ramps,
so every L1 norm is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import Interval
from .errors import ConstructionInfeasibleError, InternalError, InvalidParameterError
from .generators import GeneratorFamily, arrow_profile_family
from .profiles import ArrowProfile, cumulative_sums
from .quadrature import QuadratureConfig

# plateau radii are floored here (in ulps of the centre) so knots stay distinct
RADIUS_FLOOR_ULPS = 4096
COVERING_CAP = 10_000


def merge_intervals(intervals: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


def cantor_intervals(depth: int, base: Interval) -> list[tuple[float, float]]:
    """The 2**depth closed intervals left after ``depth`` middle-third removals."""
    if depth < 0:
        raise InvalidParameterError("cantor depth must be >= 0")
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for a, b in ivs:
            third = (b - a) / 3
            nxt += [(a, a + third), (b - third, b)]
        ivs = nxt
    scale = lambda t: base.lo + float(t) * base.width  # noqa: E731
    return [(scale(a), scale(b)) for a, b in ivs]


@dataclass(frozen=True)
class TargetSetSpec:
    """Finite stand-in for a measure-zero target set V.

    ``finite-points`` uses the given points; ``cantor-approx`` uses the
    endpoints of the depth-d middle-thirds intervals (points of the Cantor set).
    """

    kind: str
    base: Interval
    points: tuple = ()
    depth: int = 0

    def __post_init__(self):
        if self.kind == "finite-points":
            pts = tuple(sorted(set(float(p) for p in self.points)))
            if not pts:
                raise InvalidParameterError("finite target set is empty")
            if any(not self.base.contains(p) for p in pts):
                raise InvalidParameterError("target points must lie in the base interval")
            object.__setattr__(self, "points", pts)
        elif self.kind == "cantor-approx":
            ends = sorted(set(t for iv in cantor_intervals(self.depth, self.base) for t in iv))
            object.__setattr__(self, "points", tuple(ends))
        else:
            raise InvalidParameterError(f"unknown target kind {self.kind!r}")

    @classmethod
    def midpoint(cls, U: Interval) -> "TargetSetSpec":
        return cls("finite-points", U, (U.mid,))

    @classmethod
    def cantor(cls, depth: int, base: Interval) -> "TargetSetSpec":
        return cls("cantor-approx", base, depth=depth)

    @property
    def intervals(self) -> list[tuple[float, float]]:
        if self.kind == "cantor-approx":
            return cantor_intervals(self.depth, self.base)
        return [(p, p) for p in self.points]


@dataclass(frozen=True)
class BumpSpec:
    plateau: tuple
    support: tuple
    height: float

    def __post_init__(self):
        if self.height < 0:
            raise InvalidParameterError("bump height must be nonnegative")
        plateau = tuple(merge_intervals(self.plateau))
        support = tuple(merge_intervals(self.support))
        for lo, hi in plateau:
            if not any(s_lo < lo and hi < s_hi for s_lo, s_hi in support):
                raise InvalidParameterError(f"plateau piece ({lo}, {hi}) is not strictly inside the support")
        object.__setattr__(self, "plateau", plateau)
        object.__setattr__(self, "support", support)

    def profile(self, U: Interval) -> ArrowProfile:
        """Trapezoid: height on the plateau hull of each support component, linear ramps to 0."""
        knots = [(U.lo - 1.0, 0.0)] if self.support[0][0] > U.lo - 1.0 else []
        for s_lo, s_hi in self.support:
            inside = [p for p in self.plateau if s_lo < p[0] and p[1] < s_hi]
            if not inside:
                continue
            knots += [(s_lo, 0.0), (inside[0][0], self.height), (inside[-1][1], self.height), (s_hi, 0.0)]
        last = knots[-1][0]
        knots.append((max(U.hi, last) + 1.0, 0.0))
        return ArrowProfile.from_knots(knots).clipped(U)


@dataclass
class ConstructionCertificate:
    kind: str
    bump_l1: list
    profile_l1: list
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "bump_l1": self.bump_l1, "profile_l1": self.profile_l1, **self.data}


def _anchor_for(profile: ArrowProfile, U: Interval) -> float:
    """Zero of the (largest, nonnegative) profile nearest the midpoint, else the midpoint."""
    if profile(U.mid) == 0:
        return U.mid
    zeros = [x for x, a in zip(profile.xs, profile.values) if a == 0 and U.lo < x < U.hi]
    if not zeros:
        return U.mid
    return float(min(zeros, key=lambda x: (abs(x - U.mid), x)))


def build_prop51_family(V: TargetSetSpec, eps: float, U: Interval, n_max: int = 64,
                        quad: QuadratureConfig | None = None) -> tuple[GeneratorFamily, ConstructionCertificate]:
    """Non-max family whose Arrow profiles are unbounded on V with L1 norm < eps.

    With m target points, G_k is the union of balls of radius r_k = eps/(8 m 2^k)
    and H_k the union of the doubled balls, so lambda(H_k) <= eps/2^(k+1) and
    H_k is inside G_{k-1}. s_k = 1 on G_k, 0 off H_k.
    """
    if not eps > 0:
        raise InvalidParameterError("eps must be positive")
    if n_max < 1:
        raise InvalidParameterError("n_max must be >= 1")
    pts = V.points
    m = len(pts)
    floor = RADIUS_FLOOR_ULPS * max(np.spacing(abs(p)) for p in pts + (U.lo, U.hi))
    radii, floored = [], []
    for k in range(1, n_max + 1):
        r = eps / (8.0 * m * 2.0**k)
        floored.append(bool(r < floor))
        radii.append(max(r, floor))
    for p in pts:
        if not (U.lo < p - 2 * radii[0] and p + 2 * radii[0] < U.hi):
            raise ConstructionInfeasibleError(
                f"cover of target point {p!r} (radius {2 * radii[0]:.3g}) does not fit inside {U}"
            )

    bumps = [
        BumpSpec(tuple((p - r, p + r) for p in pts), tuple((p - 2 * r, p + 2 * r) for p in pts), 1.0)
        for r in radii
    ]
    bump_profiles = [b.profile(U) for b in bumps]
    sums = cumulative_sums(bump_profiles, U)
    anchor = _anchor_for(sums[-1], U)
    fam = arrow_profile_family(sums, U, anchor=anchor, quad=quad, label="prop51")

    cover = [sum(hi - lo for lo, hi in b.support) for b in bumps]
    cert = ConstructionCertificate(
        kind="prop51",
        bump_l1=[p.l1_norm() for p in bump_profiles],
        profile_l1=[s.l1_norm() for s in sums],
        data={
            "eps": eps,
            "target": list(pts),
            "cover_lengths": cover,
            "cover_bounds": [eps / 2.0**k for k in range(1, n_max + 1)],
            "radius_floored": floored,
            "values_on_target": [[float(s(p)) for p in pts] for s in sums],
            "anchor": anchor,
        },
    )
    return fam, cert


def rational_enumeration(U: Interval, count: int) -> list[float]:
    return [float(f) for f in rational_fractions(U, count)]


def rational_fractions(U: Interval, count: int) -> list[Fraction]:
    """First ``count`` rationals strictly inside U, by denominator then numerator, in lowest terms."""
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    out: list[Fraction] = []
    d = 1
    while len(out) < count:
        for num in range(math.floor(U.lo * d), math.ceil(U.hi * d) + 1):
            if math.gcd(num, d) != 1:
                continue
            fr = Fraction(num, d)
            if U.lo < fr < U.hi:
                out.append(fr)
                if len(out) == count:
                    break
        d += 1
    return out


def _clip_pairs(pairs, U):
    clipped = False
    out = []
    for lo, hi in pairs:
        if lo < U.lo or hi > U.hi:
            clipped = True
        out.append((lo, hi))
    return out, clipped


def build_prop53_family(U: Interval, max_k: int, rational_count: int | None = None,
                        query: tuple[float, float] = (0.2, 0.8), quad: QuadratureConfig | None = None,
                        ) -> tuple[GeneratorFamily, ConstructionCertificate]:
    """Increasing max-family with A_{f_n} = c_1 + ... + c_n concentrated near the rationals.

    c_k = k^2 on Q_k = U_{i<=k} B(q_i, 1/(k^2 2^i)), 0 off the doubled balls.
    Each ball sitting inside the query interval contributes more than 2^(1-i)
    to the integral, so int_x^y A_{f_n} > (n - k0) 2^(1-i) for n > k0.
    """
    if max_k < 1:
        raise InvalidParameterError("max_k must be >= 1")
    rational_count = max_k if rational_count is None else rational_count
    if rational_count < max_k:
        raise InvalidParameterError("rational_count must be >= max_k")
    qs = rational_enumeration(U, rational_count)
    bumps, clipped_any, floored_any = [], [], []
    for k in range(1, max_k + 1):
        raw = [1.0 / (k * k * 2.0**i) for i in range(1, k + 1)]
        radii = [max(r, RADIUS_FLOOR_ULPS * np.spacing(abs(qs[i - 1]))) for i, r in enumerate(raw, 1)]
        floored_any.append(bool(any(r != f for r, f in zip(raw, radii))))
        plateau = [(qs[i] - r, qs[i] + r) for i, r in enumerate(radii)]
        support, clipped = _clip_pairs([(qs[i] - 2 * r, qs[i] + 2 * r) for i, r in enumerate(radii)], U)
        clipped_any.append(clipped)
        bumps.append(BumpSpec(tuple(plateau), tuple(support), float(k * k)))
    bump_profiles = [b.profile(U) for b in bumps]
    sums = cumulative_sums(bump_profiles, U)
    anchor = _anchor_for(sums[-1], U)
    fam = arrow_profile_family(sums, U, anchor=anchor, quad=quad, label="prop53")

    qx, qy = query
    if not (U.lo <= qx < qy <= U.hi):
        raise InvalidParameterError("query interval must lie inside U")
    # first rational centre inside the query interval, and the first k whose ball fits
    i_idx = next((i for i, q in enumerate(qs[:max_k]) if qx < q < qy), None)
    data = {
        "rationals": qs,
        "clipped": clipped_any,
        "radius_floored": floored_any,
        "query": [qx, qy],
        "query_integrals": [s.integral(qx, qy) for s in sums],
        "anchor": anchor,
    }
    if i_idx is not None:
        i = i_idx + 1
        q = qs[i_idx]
        k_fit = next(k for k in range(1, 10**6) if qx <= q - 1.0 / (k * k * 2.0**i) and q + 1.0 / (k * k * 2.0**i) <= qy)
        k0 = max(i, k_fit)
        data.update({
            "centre": q,
            "centre_index": i,
            "k0": k0,
            "bump_query_integrals": [b.integral(qx, qy) for b in bump_profiles],
            "ball_lower_bound": 2.0 ** (1 - i),
            "predicted_lower_bounds": [max(0, n - k0) * 2.0 ** (1 - i) for n in range(1, max_k + 1)],
        })
    cert = ConstructionCertificate(
        kind="prop53",
        bump_l1=[p.l1_norm() for p in bump_profiles],
        profile_l1=[s.l1_norm() for s in sums],
        data=data,
    )
    return fam, cert


def covering_sum(d: float, n: int, cap: int = COVERING_CAP) -> float:
    """sum_{i<=n} (4/(n^2 2^i))^d + sum_{n<i<=cap} (4/(i^2 2^i))^d."""
    def term(radius_index: int, i: int) -> float:
        # (4 / (m^2 2^i))^d in log form; 2.0**i overflows past i = 1023
        return math.exp(d * (math.log(4.0) - 2.0 * math.log(radius_index) - i * math.log(2.0)))

    head = math.fsum(term(n, i) for i in range(1, n + 1))
    tail = math.fsum(term(i, i) for i in range(n + 1, cap + 1))
    return head + tail


def covering_bound(d: float, n: int, cap: int = COVERING_CAP) -> float:
    """4^d / (n^{2d} (1 - 2^{-d})), checked against the direct covering sum."""
    if not d > 0:
        raise InvalidParameterError("covering dimension d must be positive")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    bound = 4.0**d / (n ** (2 * d) * (1.0 - 2.0**-d))
    direct = covering_sum(d, n, cap)
    if direct > bound:
        raise InternalError(f"covering sum {direct!r} exceeds its bound {bound!r} at d={d}, n={n}")
    return bound
