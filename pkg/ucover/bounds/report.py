"""Dimension bounds for l_n = c n^(-1/d) and the report that bundles them."""

import logging
import math
from enum import Enum
from typing import Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ucover.bounds.formulas import lambda_matrix, s_exponent
from ucover.bounds.optimize import THETA_MAX, optimize_theta
from ucover.errors import DomainError

logger = logging.getLogger(__name__)

LIMIT_AT_INFINITY = "limit_at_infinity"
"""Marker for an optimum reached only as theta grows without bound."""

ThetaStar = Union[float, Literal["limit_at_infinity"]]


class Regime(str, Enum):
    """Position of c relative to the threshold 1/2."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"

    @classmethod
    def of(cls, c: float) -> "Regime":
        """Regime of a scale constant."""
        if c < 0.5:
            return cls.SUBCRITICAL
        if c == 0.5:
            return cls.CRITICAL
        return cls.SUPERCRITICAL


class BoundReport(BaseModel):
    """Lower and upper dimension bounds of U for one (c, d)."""

    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0, description="Scale constant")
    d: int = Field(..., ge=1, description="Torus dimension")
    lower_bound: float = Field(..., ge=0, description="Almost-sure lower bound on dim_H U")
    theta_star_lower: ThetaStar = Field(..., description="Maximizing theta of the lower bound")
    upper_bound: float = Field(..., ge=0, description="Almost-sure upper bound on dim_H U")
    theta_star_upper: ThetaStar = Field(..., description="Minimizing theta of the upper bound")
    s_at_theta_star: float = Field(..., description="s(c, theta) at theta_star_lower")
    lambda_at_theta_star: float = Field(..., description="Lambda at theta_star_upper")
    regime: Regime


def _check(c: float, d: int) -> None:
    if not c > 0 or d < 1:
        raise DomainError(f"bounds need c > 0 and d >= 1, got c={c}, d={d}")


def _theta_eval_point(theta_star: ThetaStar) -> float:
    return THETA_MAX if theta_star == LIMIT_AT_INFINITY else float(theta_star)


def lower_bound_dim(c: float, d: int) -> Tuple[float, ThetaStar]:
    """sup over theta of d - s(c, theta), floored at 0.

    Returns:
        (value, theta_star); theta_star is LIMIT_AT_INFINITY when the supremum
        is only approached as theta grows, which is the case for every c <= 1/2
    """
    _check(c, d)
    best = optimize_theta(lambda theta: d - s_exponent(c, d, theta), mode="max")
    if best.at_limit or best.value <= 0.0:
        return 0.0 if best.value <= 0.0 else min(float(d), best.value), LIMIT_AT_INFINITY
    return min(float(d), best.value), best.theta


def upper_bound_dim(c: float, d: int) -> Tuple[float, ThetaStar]:
    """inf over theta of d log Lambda / log theta, capped at d.

    Returns:
        (value, theta_star); theta_star is LIMIT_AT_INFINITY when the infimum
        is only approached as theta grows
    """
    _check(c, d)
    best = optimize_theta(
        lambda theta: d * math.log(lambda_matrix(c, d, theta).lam) / math.log(theta), mode="min"
    )
    if best.at_limit or best.value >= d:
        return float(d) if best.value >= d else best.value, LIMIT_AT_INFINITY
    return best.value, best.theta


def bound_report(c: float, d: int) -> BoundReport:
    """Both bounds, their optimizers and the regime of c."""
    lower, theta_lower = lower_bound_dim(c, d)
    upper, theta_upper = upper_bound_dim(c, d)
    report = BoundReport(
        c=c,
        d=d,
        lower_bound=lower,
        theta_star_lower=theta_lower,
        upper_bound=upper,
        theta_star_upper=theta_upper,
        s_at_theta_star=s_exponent(c, d, _theta_eval_point(theta_lower)),
        lambda_at_theta_star=lambda_matrix(c, d, _theta_eval_point(theta_upper)).lam,
        regime=Regime.of(c),
    )
    logger.debug(f"Bounds for c={c}, d={d}: [{lower:.6f}, {upper:.6f}]")
    return report
