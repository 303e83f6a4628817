"""Generators of quasi-arithmetic means and sequences of them.

A generator is a strictly monotone function on a finite interval together with
its first two derivatives and, when known, a closed-form inverse. Generators
rebuilt from a prescribed Arrow profile A = f''/f' are tabulated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .domain import Interval
from .errors import DomainError, InvalidParameterError, NoBracketError, UnsupportedGeneratorError
from .profiles import ArrowProfile
from .quadrature import QuadratureConfig, cell_integrals, subdivide

INCREASING = "increasing"
DECREASING = "decreasing"

# bisection stops once the bracket is this narrow (relative to its magnitude)
BISECT_WIDTH = 1e-12
# max |A| * cell width when tabulating a generator from its Arrow profile
MAX_LOG_STEP = 0.5

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True, eq=False)
class Generator:
    domain: Interval
    eval: Callable
    deriv1: Callable
    deriv2: Callable | None = None
    direction: str = INCREASING
    inverse: Callable | None = None
    log_abs_deriv1: Callable | None = None
    arrow_fn: Callable | None = None
    label: str = "generator"
    breakpoints: tuple = ()
    profile: ArrowProfile | None = None

    def __post_init__(self):
        if self.direction not in (INCREASING, DECREASING):
            raise InvalidParameterError(f"direction must be increasing or decreasing, not {self.direction!r}")

    def __call__(self, x):
        return self.eval(x)

    @property
    def smooth(self) -> bool:
        return self.deriv2 is not None or self.arrow_fn is not None

    def arrow(self, x):
        """A_f(x) = f''(x)/f'(x)."""
        if self.arrow_fn is not None:
            return self.arrow_fn(x)
        if self.deriv2 is None:
            raise UnsupportedGeneratorError(f"{self.label} has no second derivative")
        return self.deriv2(x) / self.deriv1(x)

    def log_deriv1(self, x):
        """log |f'(x)|, overflow-free when the generator supplies it."""
        if self.log_abs_deriv1 is not None:
            return self.log_abs_deriv1(x)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.deriv1(x)))

    def increasing(self) -> "Generator":
        """Return f when f increases, otherwise -f (same means, same Arrow profile)."""
        return self if self.direction == INCREASING else affine_transform(self, -1.0, 0.0)


def _scalar(fn):
    """Return python floats for scalar input, arrays otherwise."""

    def wrapped(x):
        out = fn(np.asarray(x, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    return wrapped


def builtin_generator(kind: str, params: Sequence[float] = (), domain: Interval | None = None) -> Generator:
    """Closed-form generators: ``identity``, ``log``, ``power`` (x**p), ``exponential`` (exp(t*x))."""
    params = tuple(float(p) for p in params)
    if domain is None:
        raise InvalidParameterError("a finite domain is required")
    if kind == "identity":
        return Generator(
            domain=domain,
            eval=_scalar(lambda x: x + 0.0),
            deriv1=_scalar(lambda x: np.ones_like(x)),
            deriv2=_scalar(lambda x: np.zeros_like(x)),
            inverse=_scalar(lambda y: y + 0.0),
            log_abs_deriv1=_scalar(lambda x: np.zeros_like(x)),
            arrow_fn=_scalar(lambda x: np.zeros_like(x)),
            label="identity",
        )
    if kind == "log":
        if domain.lo <= 0:
            raise DomainError("log generator needs a domain inside (0, inf)")
        return Generator(
            domain=domain,
            eval=_scalar(np.log),
            deriv1=_scalar(lambda x: 1.0 / x),
            deriv2=_scalar(lambda x: -1.0 / (x * x)),
            inverse=_scalar(np.exp),
            log_abs_deriv1=_scalar(lambda x: -np.log(x)),
            arrow_fn=_scalar(lambda x: -1.0 / x),
            label="log",
        )
    if kind == "power":
        if len(params) != 1:
            raise InvalidParameterError("power generator takes one parameter p")
        (p,) = params
        if p == 0:
            raise InvalidParameterError("power exponent must be nonzero (use log for p = 0)")
        if domain.lo <= 0:
            raise DomainError("power generator needs a domain inside (0, inf)")
        return Generator(
            domain=domain,
            eval=_scalar(lambda x: x**p),
            deriv1=_scalar(lambda x: p * x ** (p - 1)),
            deriv2=_scalar(lambda x: p * (p - 1) * x ** (p - 2)),
            direction=INCREASING if p > 0 else DECREASING,
            inverse=_scalar(lambda y: y ** (1.0 / p)),
            log_abs_deriv1=_scalar(lambda x: math.log(abs(p)) + (p - 1) * np.log(x)),
            arrow_fn=_scalar(lambda x: (p - 1) / x),
            label=f"power:{p!r}",
        )
    if kind in ("exponential", "exp"):
        if len(params) != 1:
            raise InvalidParameterError("exponential generator takes one parameter t")
        (t,) = params
        if t == 0:
            raise InvalidParameterError("exponential rate must be nonzero")
        return Generator(
            domain=domain,
            eval=_scalar(lambda x: np.exp(t * x)),
            deriv1=_scalar(lambda x: t * np.exp(t * x)),
            deriv2=_scalar(lambda x: t * t * np.exp(t * x)),
            direction=INCREASING if t > 0 else DECREASING,
            inverse=_scalar(lambda y: np.log(y) / t),
            log_abs_deriv1=_scalar(lambda x: math.log(abs(t)) + t * x),
            arrow_fn=_scalar(lambda x: np.full_like(x, t)),
            label=f"exp:{t!r}",
        )
    raise InvalidParameterError(f"unknown generator kind {kind!r}")


def affine_transform(g: Generator, alpha: float, beta: float) -> Generator:
    """alpha*g + beta; same means and same Arrow operator as g."""
    alpha, beta = float(alpha), float(beta)
    if alpha == 0:
        raise InvalidParameterError("affine coefficient alpha must be nonzero")
    flip = alpha < 0
    direction = g.direction if not flip else (DECREASING if g.direction == INCREASING else INCREASING)
    inverse = None
    if g.inverse is not None:
        inverse = lambda y: g.inverse((y - beta) / alpha)  # noqa: E731
    log_alpha = math.log(abs(alpha))
    return Generator(
        domain=g.domain,
        eval=lambda x: alpha * g.eval(x) + beta,
        deriv1=lambda x: alpha * g.deriv1(x),
        deriv2=None if g.deriv2 is None else (lambda x: alpha * g.deriv2(x)),
        direction=direction,
        inverse=inverse,
        log_abs_deriv1=lambda x: log_alpha + g.log_deriv1(x),
        arrow_fn=g.arrow_fn,
        label=f"affine({g.label},{alpha!r},{beta!r})",
        breakpoints=g.breakpoints,
        profile=g.profile,
    )


def reflect(g: Generator) -> Generator:
    """x -> g(-x) on the reflected domain."""
    direction = DECREASING if g.direction == INCREASING else INCREASING
    inverse = None if g.inverse is None else (lambda y: -g.inverse(y))
    arrow_fn = None if g.arrow_fn is None else (lambda u: -g.arrow_fn(-np.asarray(u)))
    return Generator(
        domain=g.domain.reflected(),
        eval=lambda u: g.eval(-np.asarray(u) if np.ndim(u) else -u),
        deriv1=lambda u: -g.deriv1(-np.asarray(u) if np.ndim(u) else -u),
        deriv2=None if g.deriv2 is None else (lambda u: g.deriv2(-np.asarray(u) if np.ndim(u) else -u)),
        direction=direction,
        inverse=inverse,
        log_abs_deriv1=lambda u: g.log_deriv1(-np.asarray(u) if np.ndim(u) else -u),
        arrow_fn=arrow_fn,
        label=f"reflect({g.label})",
        breakpoints=tuple(sorted(-b for b in g.breakpoints)),
        profile=None if g.profile is None else g.profile.reflected(),
    )


def invert(g: Generator, y: float, bracket: Interval | None = None) -> float:
    """Solve g(x) = y for x in ``bracket`` (defaults to the generator's domain)."""
    bracket = bracket or g.domain
    lo, hi = bracket.lo, bracket.hi
    sign = 1.0 if g.direction == INCREASING else -1.0
    f_lo, f_hi = sign * g.eval(lo), sign * g.eval(hi)
    target = sign * y
    if not (f_lo <= target <= f_hi):
        raise NoBracketError(f"value {y!r} is outside the image of [{lo}, {hi}] under {g.label}")
    if target == f_lo:
        return lo
    if target == f_hi:
        return hi

    if g.inverse is not None:
        x = float(g.inverse(y))
        if math.isfinite(x):
            return min(max(x, lo), hi)

    a, b = lo, hi
    for _ in range(400):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b or (b - a) <= BISECT_WIDTH * max(1.0, abs(a) + abs(b)):
            break
        if sign * g.eval(mid) < target:
            a = mid
        else:
            b = mid
    x = 0.5 * (a + b)
    res = sign * g.eval(x) - target
    # Newton polish, kept only while it stays bracketed and improves the residual
    for _ in range(3):
        d = sign * g.deriv1(x)
        if not (d > 0) or res == 0:
            break
        cand = x - res / d
        if not (lo <= cand <= hi):
            break
        cand_res = sign * g.eval(cand) - target
        if abs(cand_res) >= abs(res):
            break
        x, res = cand, cand_res
    return x


def _arrow_nodes(profile: ArrowProfile, anchor: float, max_step: float) -> np.ndarray:
    knots = np.unique(np.concatenate((profile.xs, [anchor])))
    h = np.diff(knots)
    amax = np.abs(profile(knots))
    steep = np.maximum(amax[:-1], amax[1:]) * h / MAX_LOG_STEP
    counts = np.maximum(1, np.ceil(np.maximum(h / max_step, steep))).astype(int)
    return subdivide(knots, counts)


def generator_from_arrow(A: ArrowProfile, anchor: float, q: QuadratureConfig | None = None) -> Generator:
    """Increasing generator with prescribed Arrow profile, normalised at ``anchor``.

    f'(t) = exp(int_anchor^t A), f(tau) = int_anchor^tau f', so f(anchor) = 0 and
    f'(anchor) = 1. The log-derivative is exact for piecewise-linear A; f itself
    is tabulated by Simpson quadrature on a grid that includes every knot, and
    evaluated between grid nodes by 8-point Gauss-Legendre from the left node.
    """
    q = q or QuadratureConfig()
    domain = A.domain
    if not domain.contains(anchor, strict=True):
        raise InvalidParameterError(f"anchor {anchor!r} must lie strictly inside {domain}")
    base = A.primitive(anchor)

    def log_d1(t):
        return A.primitive(t) - base

    def d1(t):
        return np.exp(log_d1(t))

    nodes = _arrow_nodes(A, anchor, q.max_step)
    cells = cell_integrals(d1, nodes, q)
    F = np.concatenate(([0.0], np.cumsum(cells)))
    F = F - F[np.searchsorted(nodes, anchor)]

    def f(tau):
        tau = np.asarray(tau, dtype=float)
        k = np.clip(np.searchsorted(nodes, tau, side="right") - 1, 0, nodes.size - 2)
        x0 = nodes[k]
        d = tau - x0
        pts = x0[..., None] + 0.5 * (_GL_NODES + 1.0) * d[..., None]
        part = 0.5 * d * np.sum(_GL_WEIGHTS * d1(pts), axis=-1)
        out = F[k] + part
        return float(out) if out.ndim == 0 else out

    def d2(t):
        return A(t) * d1(t)

    return Generator(
        domain=domain,
        eval=f,
        deriv1=_scalar(d1),
        deriv2=_scalar(d2),
        log_abs_deriv1=_scalar(log_d1),
        arrow_fn=_scalar(A),
        label="arrow-profile",
        breakpoints=tuple(float(x) for x in A.xs[1:-1]),
        profile=A,
    )


@dataclass(frozen=True, eq=False)
class GeneratorFamily:
    """Sequence n -> f_n (n >= 1) on a shared domain; generators are built lazily and cached."""

    build: Callable[[int], Generator]
    label: str
    domain: Interval
    indices: tuple | None = None
    profiles: Callable[[int], ArrowProfile] | None = None
    anchor: float | None = None
    _cache: Callable = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_cache", lru_cache(maxsize=None)(self.build))

    def at(self, n: int) -> Generator:
        if int(n) != n or n < 1:
            raise InvalidParameterError(f"family index must be an integer >= 1, got {n!r}")
        n = int(n)
        if self.indices is not None and n not in self.indices:
            raise InvalidParameterError(f"family {self.label} has no member n={n}")
        g = self._cache(n)
        if g.domain != self.domain:
            raise InvalidParameterError(f"member n={n} has domain {g.domain}, family has {self.domain}")
        return g


def _rule(params, name):
    if callable(params):
        return params
    params = tuple(params) if isinstance(params, (list, tuple)) else (params,)
    if len(params) == 0:
        scale = 1.0
    elif len(params) == 1:
        scale = float(params[0])
    else:
        raise InvalidParameterError(f"{name} takes one scale parameter or a callable rule")
    if scale == 0 or not math.isfinite(scale):
        raise InvalidParameterError(f"{name} scale must be finite and nonzero")
    return lambda n: scale * n


def builtin_family(kind: str, params=(), domain: Interval | None = None, **kw) -> GeneratorFamily:
    """Families ``power-seq`` (x**p_n), ``exp-seq`` (exp(t_n x)), ``constant`` and ``arrow-profile-seq``.

    For the two sequences ``params`` is either a callable rule n -> parameter or
    a scale c meaning p_n = c*n (default c = 1).
    """
    if domain is None:
        raise InvalidParameterError("a finite domain is required")
    if kind == "power-seq":
        rule = _rule(params, kind)
        return GeneratorFamily(lambda n: builtin_generator("power", [rule(n)], domain), "power-seq", domain)
    if kind == "exp-seq":
        rule = _rule(params, kind)
        return GeneratorFamily(lambda n: builtin_generator("exponential", [rule(n)], domain), "exp-seq", domain)
    if kind == "constant":
        g = params if isinstance(params, Generator) else builtin_generator(params[0], params[1:], domain)
        if g.domain != domain:
            raise InvalidParameterError("constant family generator must live on the family domain")
        return GeneratorFamily(lambda n: g, f"constant:{g.label}", domain)
    if kind == "arrow-profile-seq":
        return arrow_profile_family(params, domain=domain, **kw)
    raise InvalidParameterError(f"unknown family kind {kind!r}")


def arrow_profile_family(
    profiles: Mapping[int, ArrowProfile] | Sequence[ArrowProfile] | Callable[[int], ArrowProfile],
    domain: Interval,
    anchor: float | None = None,
    quad: QuadratureConfig | None = None,
    label: str = "arrow-profile-seq",
) -> GeneratorFamily:
    """Family n -> generator_from_arrow(A_n, anchor); sequences are indexed from n = 1."""
    if callable(profiles):
        lookup, indices = profiles, None
    elif isinstance(profiles, Mapping):
        table = dict(profiles)
        lookup, indices = table.__getitem__, tuple(sorted(table))
    else:
        seq = list(profiles)
        lookup, indices = (lambda n: seq[n - 1]), tuple(range(1, len(seq) + 1))
    anchor = domain.mid if anchor is None else float(anchor)
    quad = quad or QuadratureConfig()

    def build(n):
        A = lookup(n)
        if A.domain != domain:
            A = A.clipped(domain)
        return generator_from_arrow(A, anchor, quad)

    return GeneratorFamily(build, label, domain, indices=indices, profiles=lookup, anchor=anchor)
