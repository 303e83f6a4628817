"""Vectorised Simpson quadrature.

Integrands must accept numpy arrays. Cells are first laid out so that no cell
is wider than ``max_step`` and every breakpoint is a cell boundary; each cell
is then integrated with Simpson's rule, optionally refined adaptively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import InvalidParameterError, QuadratureError

METHODS = ("composite-Simpson", "adaptive-Simpson")

# bisection depth for adaptive refinement of a single cell
MAX_DEPTH = 40
# cells are also accepted at this relative accuracy; abs_tol alone is
# unreachable once integrands reach ~1e4 in double precision
REL_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "adaptive-Simpson"
    max_step: float = 1e-2
    abs_tol: float = 1e-10

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameterError(f"unknown quadrature method {self.method!r}")
        if not self.max_step > 0:
            raise InvalidParameterError("max_step must be positive")
        if not self.abs_tol > 0:
            raise InvalidParameterError("abs_tol must be positive")

    def to_dict(self) -> dict:
        return {"method": self.method, "max_step": self.max_step, "abs_tol": self.abs_tol}


def _simpson(func, lo, hi):
    mid = 0.5 * (lo + hi)
    return (hi - lo) / 6.0 * (func(lo) + 4.0 * func(mid) + func(hi))


def make_nodes(a: float, b: float, max_step: float, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Sorted cell boundaries on [a, b] honouring breakpoints and ``max_step``."""
    bps = np.asarray(breakpoints, dtype=float).ravel()
    bps = np.unique(bps[(bps > a) & (bps < b)])
    coarse = np.concatenate(([a], bps, [b]))
    counts = np.maximum(1, np.ceil(np.diff(coarse) / max_step)).astype(int)
    return subdivide(coarse, counts)


def subdivide(coarse: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Split segment i of ``coarse`` into counts[i] equal cells."""
    seg = np.repeat(np.arange(counts.size), counts)
    start = np.cumsum(counts) - counts
    frac = (np.arange(seg.size) - start[seg]) / counts[seg]
    lo, width = coarse[:-1][seg], np.diff(coarse)[seg]
    return np.concatenate((lo + frac * width, coarse[-1:]))


def cell_integrals(func: Callable, nodes: np.ndarray, config: QuadratureConfig) -> np.ndarray:
    """Integral of ``func`` over each cell [nodes[i], nodes[i+1]]."""
    nodes = np.asarray(nodes, dtype=float)
    lo, hi = nodes[:-1], nodes[1:]
    ncell = lo.size
    out = np.zeros(ncell)
    if ncell == 0:
        return out
    total = float(nodes[-1] - nodes[0])
    owner = np.arange(ncell)
    # local tolerance proportional to width so the sum meets abs_tol
    tol_density = config.abs_tol / max(total, np.finfo(float).tiny)

    for depth in range(MAX_DEPTH + 1):
        mid = 0.5 * (lo + hi)
        with np.errstate(over="ignore", invalid="ignore"):
            coarse = _simpson(func, lo, hi)
            fine = _simpson(func, lo, mid) + _simpson(func, mid, hi)
            err = np.abs(fine - coarse) / 15.0
        if not (np.all(np.isfinite(fine)) and np.all(np.isfinite(coarse))):
            raise QuadratureError("integrand is not finite on the integration range")
        if config.method == "composite-Simpson":
            if np.sum(err) > max(config.abs_tol, REL_TOL * np.sum(np.abs(fine))):
                raise QuadratureError(
                    f"composite Simpson error estimate {np.sum(err):.3e} exceeds abs_tol; "
                    "reduce max_step"
                )
            np.add.at(out, owner, fine + (fine - coarse) / 15.0)
            return out
        done = err <= np.maximum(tol_density * (hi - lo), REL_TOL * np.abs(fine))
        np.add.at(out, owner[done], (fine + (fine - coarse) / 15.0)[done])
        if done.all():
            return out
        keep = ~done
        lo, mid, hi, owner = lo[keep], mid[keep], hi[keep], owner[keep]
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        owner = np.concatenate((owner, owner))
    raise QuadratureError(f"adaptive Simpson did not reach abs_tol={config.abs_tol} in {MAX_DEPTH} levels")


def integrate(
    func: Callable,
    a: float,
    b: float,
    config: QuadratureConfig | None = None,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integral of ``func`` over [a, b]; a > b gives the negated integral."""
    config = config or QuadratureConfig()
    if a == b:
        return 0.0
    if a > b:
        return -integrate(func, b, a, config, breakpoints)
    nodes = make_nodes(a, b, config.max_step, breakpoints)
    return float(np.sum(cell_integrals(func, nodes, config)))
