"""Grid-then-refine optimizer over theta in (1, theta_max]."""

import logging
import math
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from ucover.errors import DomainError, NumericError

logger = logging.getLogger(__name__)

THETA_MIN = 1.0 + 1e-6
THETA_MAX = 1e6
GRID_POINTS = 2048
REL_TOL = 1e-10

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


class ThetaOptimum(BaseModel):
    """Result of a theta scan."""

    theta: float = Field(..., description="Best theta found (the bracket edge when at_limit)")
    value: float = Field(..., description="Objective at theta")
    at_limit: bool = Field(
        default=False, description="Best value sits at the right edge with a monotone trend"
    )


def theta_grid(theta_min: float = THETA_MIN, theta_max: float = THETA_MAX, points: int = GRID_POINTS) -> np.ndarray:
    """Grid with log-uniform spacing of theta - 1, so both ends of (1, theta_max] are resolved."""
    return 1.0 + np.geomspace(theta_min - 1.0, theta_max - 1.0, points)


def golden_section(
    objective: Callable[[float], float], a: float, b: float, rel_tol: float = REL_TOL
) -> float:
    """Minimize a scalar function on [a, b] by golden-section search.

    Args:
        objective: Function to minimize
        a: Left end of the bracket
        b: Right end of the bracket
        rel_tol: Stop once the bracket is shorter than rel_tol * b

    Returns:
        Midpoint of the final bracket
    """
    dist = b - a
    c = a + _INV_PHI_SQ * dist
    e = a + _INV_PHI * dist
    fc = objective(c)
    fe = objective(e)

    while dist > rel_tol * abs(b):
        if fc < fe:
            b, e, fe = e, c, fc
            dist = _INV_PHI * dist
            c = a + _INV_PHI_SQ * dist
            fc = objective(c)
        else:
            a, c, fc = c, e, fe
            dist = _INV_PHI * dist
            e = a + _INV_PHI * dist
            fe = objective(e)

    return (a + b) / 2.0


def optimize_theta(
    objective: Callable[[float], float],
    mode: Literal["min", "max"] = "min",
    theta_max: float = THETA_MAX,
    points: int = GRID_POINTS,
    theta_min: Optional[float] = None,
) -> ThetaOptimum:
    """Optimize an objective over theta without assuming unimodality.

    A log-spaced scan picks the best grid cell, then golden-section search
    refines inside its two neighbours. When the best scanned value is the
    right edge and the last stretch of the scan is monotone toward it, the
    edge value is returned with at_limit set.

    Args:
        objective: Scalar function of theta
        mode: "min" or "max"
        theta_max: Right end of the bracket
        points: Number of scan points
        theta_min: Left end of the scan (default 1 + 1e-6)

    Returns:
        ThetaOptimum

    Raises:
        NumericError: If the objective is non-finite at a sampled theta
    """
    if mode not in ("min", "max"):
        raise DomainError(f"mode must be 'min' or 'max', got {mode!r}")
    sign = 1.0 if mode == "min" else -1.0
    grid = theta_grid(theta_min or THETA_MIN, theta_max, points)

    def signed(theta: float) -> float:
        value = float(objective(theta))
        if not math.isfinite(value):
            raise NumericError(f"objective is {value} at theta={theta}", theta=theta)
        return sign * value

    values = np.array([signed(theta) for theta in grid])
    best = int(np.argmin(values))

    if best == len(grid) - 1:
        tail = values[-min(16, len(values)) :]
        if np.all(np.diff(tail) <= 0.0):
            logger.debug(f"Optimum at the bracket edge theta={grid[-1]:.3g}")
            return ThetaOptimum(theta=float(grid[-1]), value=sign * float(values[-1]), at_limit=True)

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    theta = golden_section(signed, float(lo), float(hi))
    refined = signed(theta)
    if refined > values[best]:
        theta, refined = float(grid[best]), float(values[best])
    return ThetaOptimum(theta=theta, value=sign * refined)
