"""Deterministic multistart Nelder-Mead search over ball centers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

logger = logging.getLogger(__name__)

XATOL = 1e-8
FATOL = 1e-14


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    restarts: int
    simplex_size: float
    converged: bool
    # distinct local optima whose value lies within `near` of the best
    optima: list[tuple[np.ndarray, float]] = field(default_factory=list)


def multistart_minimize(
    fun: Callable[[np.ndarray], float],
    seeds: Sequence[np.ndarray],
    step: float,
    xatol: float = XATOL,
    fatol: float = FATOL,
    maxiter: int = 4000,
    near: float = 1e-6,
    distinct: float = 1e-5,
) -> SearchResult:
    """Minimize ``fun`` from each seed with an axis-aligned initial simplex.

    The best value wins; ties (within ``fatol``) go to the earlier seed, so the
    result depends only on the seed order.
    """
    runs = []
    ok = True
    sizes = []
    for seed in seeds:
        x0 = np.asarray(seed, dtype=float)
        simplex = np.vstack([x0, x0 + step * np.eye(len(x0))])
        res = minimize(
            fun,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": xatol,
                "fatol": fatol,
                "maxiter": maxiter,
                "maxfev": 2 * maxiter,
            },
        )
        sim = res.final_simplex[0]
        size = float(np.max(np.linalg.norm(sim - sim[0], axis=1)))
        sizes.append(size)
        ok &= bool(res.success)
        runs.append((np.asarray(res.x, dtype=float), float(res.fun)))
        if not res.success:
            logger.debug("simplex search from %s stopped: %s", x0, res.message)
    best_i = 0
    for i, (_, val) in enumerate(runs):
        if val < runs[best_i][1] - fatol:
            best_i = i
    bx, bv = runs[best_i]
    optima: list[tuple[np.ndarray, float]] = []
    for x, val in runs:
        if val <= bv + near and all(np.linalg.norm(x - o) > distinct for o, _ in optima):
            optima.append((x, val))
    optima.sort(key=lambda t: (t[1], tuple(t[0])))
    return SearchResult(bx, bv, len(runs), sizes[best_i], ok, optima)
