"""Pointwise comparison of generators through the Arrow operator A_f = f''/f'.

A_f <= A_g on the whole domain is equivalent to M_f <= M_g for every sample,
and A_f = A_g to f = alpha*g + beta. Here the pointwise check is certified on
a finite grid only; verdicts carry the grid they were checked on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError
from .generators import Generator

F_LE_G = "f_le_g"
G_LE_F = "g_le_f"
EQUAL_AFFINE = "equal_affine"
INCOMPARABLE = "incomparable"

ARROW_TOL = 1e-10
AFFINE_REL_TOL = 1e-8


@dataclass(frozen=True)
class OrderingVerdict:
    relation: str
    witness: tuple | None = None
    grid: tuple = ()

    def __post_init__(self):
        if (self.witness is not None) != (self.relation == INCOMPARABLE):
            raise InvalidParameterError("witness is present exactly when the relation is incomparable")


def arrow_operator(g: Generator, x):
    return g.arrow(x)


def compare_generators(f: Generator, g: Generator, grid: Sequence[float]) -> OrderingVerdict:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InvalidParameterError("comparison grid is empty")
    diff = np.asarray(f.arrow(grid), dtype=float) - np.asarray(g.arrow(grid), dtype=float)
    grid_t = tuple(float(x) for x in grid)
    if np.all(np.abs(diff) <= ARROW_TOL):
        return OrderingVerdict(EQUAL_AFFINE, grid=grid_t)
    if np.all(diff <= ARROW_TOL):
        return OrderingVerdict(F_LE_G, grid=grid_t)
    if np.all(diff >= -ARROW_TOL):
        return OrderingVerdict(G_LE_F, grid=grid_t)
    # witness: a point where A_f > A_g and a point where A_f < A_g
    above, below = int(np.argmax(diff)), int(np.argmin(diff))
    return OrderingVerdict(INCOMPARABLE, witness=(float(grid[above]), float(grid[below])), grid=grid_t)


def affine_fit(f: Generator, g: Generator, grid: Sequence[float]) -> tuple[float, float] | None:
    """Least-squares (alpha, beta) with f ~ alpha*g + beta, or None if the residual is too large."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise InvalidParameterError("affine fit needs at least 3 grid points")
    fv = np.asarray(f.eval(grid), dtype=float)
    gv = np.asarray(g.eval(grid), dtype=float)
    design = np.column_stack((gv, np.ones_like(gv)))
    (alpha, beta), *_ = np.linalg.lstsq(design, fv, rcond=None)
    resid = np.max(np.abs(design @ np.array([alpha, beta]) - fv))
    span = np.ptp(fv)
    if alpha == 0 or resid > AFFINE_REL_TOL * span:
        return None
    return float(alpha), float(beta)
