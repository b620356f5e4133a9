"""Utilisation that minimises the average age of information.

The age curves diverge at rho -> 0 (sparse updates) and rho -> 1 (queueing),
with a single interior minimum.  A coarse grid scan locates the basin without
assuming unimodality, then golden-section search refines the bracket.
"""

import math
from dataclasses import dataclass
from typing import Callable

from .chain import ChainParams, average_aoi
from .split import SplitParams, aoi_mixture

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

RHO_MIN = 1e-4
RHO_MAX = 1.0 - 1e-4

_GRID_STEP = 0.01


@dataclass(frozen=True)
class OptimizeResult:
    rho_star: float
    aoi_star: float
    evaluations: int
    bracket: tuple[float, float]


def _minimize_scalar(f: Callable[[float], float], tol: float) -> OptimizeResult:
    if not 0.0 < tol < 0.1:
        raise ValueError(f"tol must lie in (0, 0.1), got {tol}")
    evals = 0

    def g(x: float) -> float:
        nonlocal evals
        evals += 1
        return f(x)

    # coarse scan to pick the basin
    n = int((RHO_MAX - RHO_MIN) / _GRID_STEP) + 1
    grid = [RHO_MIN + i * _GRID_STEP for i in range(n)]
    if grid[-1] < RHO_MAX:
        grid.append(RHO_MAX)
    values = [g(x) for x in grid]
    i_best = min(range(len(grid)), key=values.__getitem__)
    lo = grid[max(i_best - 1, 0)]
    hi = grid[min(i_best + 1, len(grid) - 1)]
    best_x, best_f = grid[i_best], values[i_best]

    # golden-section refinement, tracking the best evaluated point
    a, b = lo, hi
    c = b - (b - a) * _INV_PHI
    d = a + (b - a) * _INV_PHI
    fc, fd = g(c), g(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INV_PHI
            fc = g(c)
            if fc < best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INV_PHI
            fd = g(d)
            if fd < best_f:
                best_x, best_f = d, fd
    return OptimizeResult(rho_star=best_x, aoi_star=best_f, evaluations=evals, bracket=(lo, hi))


def minimize_aoi_chain(n_nodes: int, mu: float, tol: float = 1e-3) -> OptimizeResult:
    """Utilisation minimising the chain's average age at fixed mu and hop count."""
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    if not mu > 0.0:
        raise ValueError(f"mu must be positive, got {mu}")

    def f(rho: float) -> float:
        return average_aoi(ChainParams(n_nodes=n_nodes, mu=mu, lam=rho * mu))

    return _minimize_scalar(f, tol)


def minimize_aoi_split(mu: float, p: float, tol: float = 1e-3) -> OptimizeResult:
    """Utilisation minimising the two-node mixture age at fixed mu and split p."""
    if not mu > 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")

    def f(rho: float) -> float:
        return aoi_mixture(SplitParams(mu=mu, lam=rho * mu, p=p))

    return _minimize_scalar(f, tol)
