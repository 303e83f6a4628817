"""Numerical max-family diagnostics over a finite grid of indices n.

Each test records a per-n sequence and classifies its trailing behaviour:

* ``ratio_test``             (f_n(x)-f_n(y)) / (f_n(z)-f_n(y)) -> 0 ?
* ``derivative_ratio_test``  log f_n'(q) - log f_n'(p) -> +inf ?
* ``integral_test``          int_p^q A_{f_n} -> +inf ?
* ``empirical_max_test``     max(x, z) - M_{f_n}(x, z, xi) -> 0 ?

For lower-bounded families all four answers coincide in the limit. A finite
n-grid can only suggest a limit, so every report keeps its raw sequence.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    HypothesisViolatedError,
    InternalError,
    InvalidParameterError,
    QAMError,
)
from .generators import Generator, GeneratorFamily, reflect
from .means import TwoPointQuery, qa_mean_two
from .quadrature import QuadratureConfig, integrate

DIVERGES = "diverges_to_infinity"
CONVERGES = "converges_to_zero"
BOUNDED = "bounded"
INDETERMINATE = "indeterminate"

OK = "ok"
FAILED = "failed"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QAM_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class NGrid:
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(n) for n in self.indices)
        if not idx:
            raise InvalidParameterError("n-grid is empty")
        if any(n < 1 for n in idx) or any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidParameterError("n-grid must be strictly increasing integers >= 1")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def range(cls, start: int, stop: int, step: int = 1) -> "NGrid":
        """Inclusive range start..stop."""
        return cls(tuple(range(start, stop + 1, step)))

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def as_ngrid(ns) -> NGrid:
    return ns if isinstance(ns, NGrid) else NGrid(tuple(ns))


@dataclass(frozen=True)
class TrendConfig:
    window: int | None = None
    div_threshold: float = 1e3
    zero_tol: float = 1e-3
    stability_tol: float = 1e-6

    def __post_init__(self):
        if self.window is not None and self.window < 1:
            raise InvalidParameterError("trend window must be >= 1")
        if not (self.div_threshold > 0 and self.zero_tol > 0 and self.stability_tol > 0):
            raise InvalidParameterError("trend thresholds must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrendVerdict:
    classification: str
    evidence: dict


@dataclass
class DiagnosticReport:
    test: str
    params: dict
    ns: list
    values: list
    status: list
    verdict: TrendVerdict
    c_hat: float | None = None
    phi: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def finite_values(self) -> list:
        return [v for v, s in zip(self.values, self.status) if s == OK]


@dataclass(frozen=True)
class XInfinityEstimate:
    grid: tuple
    member_flags: tuple
    threshold: float
    window: tuple

    @property
    def members(self) -> list:
        return [x for x, f in zip(self.grid, self.member_flags) if f]


@dataclass(frozen=True)
class IncreasingReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def classify_trend(values: Sequence, config: TrendConfig | None = None, ns: Sequence | None = None,
                   log_scale: bool = False) -> TrendVerdict:
    """Classify the trailing window of a per-n sequence.

    ``None``/non-finite entries are failed indices and are skipped. With
    ``log_scale`` the values are logarithms and are compared with
    log(div_threshold) and log(zero_tol) instead.
    """
    config = config or TrendConfig()
    ns = list(range(1, len(values) + 1)) if ns is None else list(ns)
    pairs = [(n, float(v)) for n, v in zip(ns, values) if v is not None and math.isfinite(v)]
    window = config.window or max(1, math.ceil(len(values) / 4))
    if len(pairs) < window or not pairs:
        return TrendVerdict(INDETERMINATE, {"count": len(pairs), "window": window})
    tail = pairs[-window:]
    tn = np.array([p[0] for p in tail], dtype=float)
    tv = np.array([p[1] for p in tail])
    slope = float(np.polyfit(tn, tv, 1)[0]) if len(tail) > 1 else 0.0
    variation = float(np.sum(np.abs(np.diff(tv))))
    evidence = {
        "window": window,
        "min": float(tv.min()),
        "max": float(tv.max()),
        "slope": slope,
        "variation": variation,
    }
    if log_scale:
        # values are log-ratios: the ratio tends to zero when the log drops below log(zero_tol)
        threshold = math.log(config.div_threshold)
        small = tv.max() < math.log(config.zero_tol)
    else:
        threshold = config.div_threshold
        small = np.max(np.abs(tv)) < config.zero_tol
    if tv.min() > threshold and slope > 0:
        return TrendVerdict(DIVERGES, evidence)
    if small:
        return TrendVerdict(CONVERGES, evidence)
    if variation < config.stability_tol:
        return TrendVerdict(BOUNDED, evidence)
    return TrendVerdict(INDETERMINATE, evidence)


def _per_n(fn: Callable[[int], float | None], ns: NGrid, workers: int | None) -> tuple[list, list]:
    """Evaluate fn on every index; QAMError / non-finite results mark that index failed."""

    def safe(n):
        try:
            with np.errstate(all="ignore"):
                v = fn(n)
        except InternalError:
            raise
        except (QAMError, OverflowError, ZeroDivisionError, FloatingPointError):
            return None
        return float(v) if v is not None and math.isfinite(v) else None

    workers = workers or default_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(safe, ns.indices))
    else:
        values = [safe(n) for n in ns.indices]
    status = [OK if v is not None else FAILED for v in values]
    return values, status


def _check_inside(fam: GeneratorFamily, *pts):
    for t in pts:
        if not fam.domain.contains(t):
            raise InvalidParameterError(f"point {t!r} lies outside the family domain {fam.domain}")


def _scaled_ratio(g: Generator, x: float, y: float, z: float) -> float:
    """(g(x)-g(y))/(g(z)-g(y)) via int exp(log g' - shift), for when g itself overflows."""
    grid = np.linspace(x, z, 257)
    shift = float(np.max(g.log_deriv1(grid)))
    integrand = lambda t: np.exp(g.log_deriv1(t) - shift)  # noqa: E731
    cfg = QuadratureConfig(max_step=(z - x) / 64, abs_tol=1e-12)
    num = -integrate(integrand, x, y, cfg, g.breakpoints)
    den = integrate(integrand, y, z, cfg, g.breakpoints)
    return num / den


def three_point_ratio(g: Generator, x: float, y: float, z: float) -> float:
    g = g.increasing()
    fx, fy, fz = (float(g.eval(t)) for t in (x, y, z))
    num, den = fx - fy, fz - fy
    if all(math.isfinite(v) for v in (num, den)) and den > 0:
        return num / den
    return _scaled_ratio(g, x, y, z)


def ratio_test(fam: GeneratorFamily, x: float, y: float, z: float, ns,
               config: TrendConfig | None = None, workers: int | None = None) -> DiagnosticReport:
    if not (x < y < z):
        raise InvalidParameterError("ratio test needs x < y < z")
    _check_inside(fam, x, z)
    ns = as_ngrid(ns)
    config = config or TrendConfig()
    values, status = _per_n(lambda n: three_point_ratio(fam.at(n), x, y, z), ns, workers)
    return DiagnosticReport(
        "ratio", {"x": x, "y": y, "z": z}, list(ns.indices), values, status,
        classify_trend(values, config, ns.indices),
    )


def log_derivative_ratio(g: Generator, p: float, q: float) -> float:
    g = g.increasing()
    with np.errstate(over="ignore"):
        for t in (p, q):
            d = float(g.deriv1(t))
            if not d > 0 and not math.isnan(d):
                raise InternalError(f"{g.label} has nonpositive derivative {d!r} at {t!r} after normalisation")
    return float(g.log_deriv1(q)) - float(g.log_deriv1(p))


def derivative_ratio_test(fam: GeneratorFamily, p: float, q: float, ns,
                          config: TrendConfig | None = None, workers: int | None = None) -> DiagnosticReport:
    """Records log(f_n'(q)/f_n'(p)); classified against log(div_threshold)."""
    if not p < q:
        raise InvalidParameterError("derivative ratio test needs p < q")
    _check_inside(fam, p, q)
    ns = as_ngrid(ns)
    config = config or TrendConfig()
    values, status = _per_n(lambda n: log_derivative_ratio(fam.at(n), p, q), ns, workers)
    return DiagnosticReport(
        "deriv-ratio", {"p": p, "q": q}, list(ns.indices), values, status,
        classify_trend(values, config, ns.indices, log_scale=True),
    )


def arrow_integral(g: Generator, p: float, q: float, quad: QuadratureConfig | None = None) -> float:
    if not g.smooth:
        raise InvalidParameterError(f"{g.label} is not smooth; the integral test needs A_f")
    return integrate(g.arrow, p, q, quad, g.breakpoints)


def integral_test(fam: GeneratorFamily, p: float, q: float, ns, quad: QuadratureConfig | None = None,
                  config: TrendConfig | None = None, workers: int | None = None) -> DiagnosticReport:
    """Records int_p^q A_{f_n}; ``extras['cross_check']`` is the largest gap to log f_n'(q)/f_n'(p)."""
    if not p < q:
        raise InvalidParameterError("integral test needs p < q")
    _check_inside(fam, p, q)
    ns = as_ngrid(ns)
    quad = quad or QuadratureConfig()
    config = config or TrendConfig()
    values, status = _per_n(lambda n: arrow_integral(fam.at(n), p, q, quad), ns, workers)
    gaps = []
    for n, v in zip(ns.indices, values):
        if v is None:
            continue
        try:
            gaps.append(abs(v - log_derivative_ratio(fam.at(n), p, q)))
        except QAMError:
            pass
    return DiagnosticReport(
        "integral", {"p": p, "q": q}, list(ns.indices), values, status,
        classify_trend(values, config, ns.indices, log_scale=True),
        extras={"cross_check": max(gaps) if gaps else None},
    )


def _empirical(fam, queries, ns, config, workers, name, gap):
    ns = as_ngrid(ns)
    config = config or TrendConfig()
    reports = []
    for qry in queries:
        _check_inside(fam, qry.x, qry.z)
        values, status = _per_n(lambda n, qry=qry: gap(qry, qa_mean_two(fam.at(n), qry)), ns, workers)
        reports.append(DiagnosticReport(
            name, qry.to_dict(), list(ns.indices), values, status,
            classify_trend(values, config, ns.indices),
        ))
    return reports


def empirical_max_test(fam: GeneratorFamily, queries: Sequence[TwoPointQuery], ns,
                       config: TrendConfig | None = None, workers: int | None = None) -> list[DiagnosticReport]:
    """One report per query with values max(x, z) - M_{f_n}(x, z, xi)."""
    return _empirical(fam, queries, ns, config, workers, "empirical",
                      lambda q, m: max(q.x, q.z) - m)


def empirical_min_test(fam: GeneratorFamily, queries: Sequence[TwoPointQuery], ns,
                       config: TrendConfig | None = None, workers: int | None = None) -> list[DiagnosticReport]:
    """One report per query with values M_{f_n}(x, z, xi) - min(x, z)."""
    return _empirical(fam, queries, ns, config, workers, "empirical-min",
                      lambda q, m: m - min(q.x, q.z))


def log_slopes(g: Generator, grid: Sequence[float]) -> np.ndarray:
    """Slopes of log f' between adjacent grid points."""
    grid = np.asarray(grid, dtype=float)
    ld = np.asarray(g.log_deriv1(grid), dtype=float)
    return np.diff(ld) / np.diff(grid)


def lower_bounded_estimate(fam: GeneratorFamily, grid: Sequence[float], ns) -> float:
    """Grid proxy for the best C with f_n'(y)/f_n'(x) >= exp(C (y - x)).

    Minimum over n and adjacent grid pairs of the slope of log f_n'. A finite
    value is necessary evidence of lower-boundedness, never a proof.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise InvalidParameterError("lower-bound estimate needs at least two grid points")
    if np.any(np.diff(grid) <= 0):
        raise InvalidParameterError("grid must be strictly increasing")
    return float(min(np.min(log_slopes(fam.at(n), grid)) for n in as_ngrid(ns)))


def increasing_check(fam: GeneratorFamily, grid: Sequence[float], ns, tol: float = 1e-10) -> IncreasingReport:
    """A_{f_n'} >= A_{f_n} - tol on the grid for consecutive n < n' in ns."""
    grid = np.asarray(grid, dtype=float)
    ns = as_ngrid(ns)
    prev_n, prev = None, None
    for n in ns:
        cur = np.asarray(fam.at(n).arrow(grid), dtype=float)
        if prev is not None:
            bad = np.nonzero(cur < prev - tol)[0]
            if bad.size:
                i = int(bad[0])
                return IncreasingReport(False, (prev_n, n, float(grid[i])))
        prev_n, prev = n, cur
    return IncreasingReport(True)


def phi_threshold(xi: float, C: float, eps: float, x: float, y: float) -> float:
    """Derivative-ratio level Phi: f'(z - eps)/f'(y) >= Phi forces M_f(x, z, xi) >= y.

    Valid for f with f'(v)/f'(u) >= exp(C (v - u)), u < v, C < 0.
    """
    if not 0 < xi < 1:
        raise InvalidParameterError("xi must lie in (0, 1)")
    if not C < 0:
        raise InvalidParameterError("the lower-bound constant C must be negative")
    if not eps > 0:
        raise InvalidParameterError("eps must be positive")
    if not x < y:
        raise InvalidParameterError("need x < y")
    return xi * math.expm1(C * (x - y)) / ((1 - xi) * -math.expm1(C * eps))


def phi_implication_check(g: Generator, xi: float, C: float, eps: float, x: float, y: float, z: float,
                          grid_size: int = 201, tol: float = 1e-12) -> bool:
    """Check  f'(z-eps)/f'(y) >= Phi  =>  M_f(x, z, xi) >= y  for one configuration."""
    if not x < y < z:
        raise InvalidParameterError("need x < y < z")
    if not 0 < eps < z - y:
        raise InvalidParameterError("need 0 < eps < z - y")
    slopes = log_slopes(g, np.linspace(x, z, grid_size))
    if np.min(slopes) < C - 1e-9 * max(1.0, abs(C)):
        raise HypothesisViolatedError(
            f"{g.label} violates the lower bound with C={C!r} on [{x}, {z}] (slope {np.min(slopes)!r})"
        )
    phi = phi_threshold(xi, C, eps, x, y)
    log_ratio = float(g.log_deriv1(z - eps)) - float(g.log_deriv1(y))
    if log_ratio < math.log(phi):
        return True
    return qa_mean_two(g, TwoPointQuery(x, z, xi)) >= y - tol * max(1.0, abs(y))


def max_derivative_ratio(g: Generator, x: float, z: float, grid_size: int = 2001) -> float:
    """Grid estimate of sup f'(q)/f'(p) over x <= p < q <= z (log scale)."""
    ld = np.asarray(g.log_deriv1(np.linspace(x, z, grid_size)), dtype=float)
    return float(np.max(ld - np.minimum.accumulate(ld)))


def obstruction_level(x: float, z: float, xi: float, H: float) -> float:
    """Upper bound y* on M_f(x, z, xi) for increasing f with f'(q)/f'(p) <= H, x <= p < q <= z.

    Normalising f(y) = 0, f'(y) = 1 gives f(z) <= H (z - y) and f(x) <= -(y - x)/H,
    so xi f(x) + (1 - xi) f(z) < 0, hence M < y, as soon as y > y*.
    """
    if not x < z:
        raise InvalidParameterError("need x < z")
    if not 0 < xi < 1:
        raise InvalidParameterError("xi must lie in (0, 1)")
    if not H >= 1:
        raise InvalidParameterError("ratio bound H must be >= 1")
    a, b = xi / H, (1 - xi) * H
    return (a * x + b * z) / (a + b)


def x_infinity_estimate(fam: GeneratorFamily, grid: Sequence[float], ns, threshold: float) -> XInfinityEstimate:
    """Flag x when A_{f_N}(x) >= threshold at the last index N and A_{f_n}(x) is
    nondecreasing over the trailing half of ns (finite proxy for A_{f_n}(x) -> inf)."""
    grid = np.asarray(grid, dtype=float)
    ns = as_ngrid(ns)
    tail = ns.indices[len(ns) // 2:]
    rows = np.array([np.asarray(fam.at(n).arrow(grid), dtype=float) for n in tail])
    nondecreasing = np.all(np.diff(rows, axis=0) >= -1e-10, axis=0) if len(tail) > 1 else np.ones(grid.size, bool)
    flags = (rows[-1] >= threshold) & nondecreasing
    return XInfinityEstimate(tuple(float(x) for x in grid), tuple(bool(f) for f in flags), float(threshold), tuple(tail))


def dualize(fam: GeneratorFamily) -> GeneratorFamily:
    """g_n(x) = f_n(-x) on the reflected domain; min-family questions become max-family ones."""
    profiles = None
    if fam.profiles is not None:
        profiles = lambda n: fam.profiles(n).reflected()  # noqa: E731
    return GeneratorFamily(
        lambda n: reflect(fam.at(n)),
        f"dual({fam.label})",
        fam.domain.reflected(),
        indices=fam.indices,
        profiles=profiles,
        anchor=None if fam.anchor is None else -fam.anchor,
    )


def reflect_query(q: TwoPointQuery) -> TwoPointQuery:
    return TwoPointQuery(-q.x, -q.z, q.xi)
