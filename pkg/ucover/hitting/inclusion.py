"""Finite-window check that U(omega, (n^-alpha)) is sandwiched by hitting-exponent level sets."""

import logging
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ucover.core import PointLike, PowerLaw, Stream, TorusPoint, in_open_ball, wrap_dist
from ucover.covering.grid import dyadic_ladder
from ucover.errors import ContractViolation, DomainError
from ucover.hitting.times import DEFAULT_WINDOW, hitting_records

logger = logging.getLogger(__name__)


class InclusionViolation(BaseModel):
    """A probe whose membership contradicts its hitting exponent."""

    probe: TorusPoint
    h_upper_estimate: float
    side: Literal["membership", "non_membership"] = Field(
        ..., description="Which inclusion failed"
    )
    checkpoint: Optional[int] = Field(
        default=None, description="First checkpoint where the probe was uncovered"
    )


class InclusionReport(BaseModel):
    """Outcome of an inclusion check."""

    alpha: float
    margin: float
    total: int = Field(..., description="Probes checked on either side")
    skipped: int = Field(..., description="Probes inside the margin band or never hit")
    violations: List[InclusionViolation] = Field(default_factory=list)


def _membership(
    stream: Stream, schedule: PowerLaw, y: np.ndarray, checkpoints: Sequence[int]
) -> List[bool]:
    """Whether y lies in the union of B(omega_n, l_N), n <= N, at each checkpoint N."""
    points = stream.block(1, checkpoints[-1] + 1)
    nearest = np.minimum.accumulate(wrap_dist(points, y))
    return [bool(in_open_ball(nearest[n - 1], schedule.radius_at(n))) for n in checkpoints]


def inclusion_check(
    stream: Stream,
    alpha: float,
    probes: Sequence[PointLike],
    margin: float,
    window: Tuple[int, int, int],
    r_hi: float = 0.25,
    k: int = 10,
    estimator_window: float = DEFAULT_WINDOW,
    threads: Optional[int] = None,
) -> InclusionReport:
    """Compare covering membership with the upper hitting exponent for l_n = n^-alpha.

    Probes with exponent below 1/alpha - margin must be covered at every
    dyadic checkpoint in [p, N]; probes above 1/alpha + margin must be
    uncovered at some checkpoint. Probes in between are skipped.

    Args:
        stream: Sample stream
        alpha: Decay exponent
        probes: Points to test
        margin: Width of the undecided band around 1/alpha
        window: (p, N, n_max): checkpoint range and hitting scan limit
        r_hi: Largest hitting radius
        k: Number of hitting radii
        estimator_window: Fraction of deepest hit radii used by the estimator
        threads: Worker threads for the hitting ladders

    Returns:
        InclusionReport
    """
    if not alpha > 0 or not margin > 0:
        raise DomainError(f"need alpha > 0 and margin > 0, got alpha={alpha}, margin={margin}")
    p, N, n_max = window
    if not 1 <= p <= N:
        raise ContractViolation(f"invalid window p={p}, N={N}")

    schedule = PowerLaw(c=1.0, alpha=alpha)
    checkpoints = dyadic_ladder(p, N)
    threshold = 1.0 / alpha
    records = hitting_records(stream, probes, r_hi, k, n_max, estimator_window, threads)

    violations: List[InclusionViolation] = []
    total = 0
    for rec in records:
        h = rec.h_upper_estimate
        if h is None or abs(h - threshold) <= margin:
            continue
        total += 1
        covered = _membership(stream, schedule, rec.probe.array(), checkpoints)
        if h < threshold - margin and not all(covered):
            first_gap = checkpoints[covered.index(False)]
            violations.append(
                InclusionViolation(
                    probe=rec.probe, h_upper_estimate=h, side="membership", checkpoint=first_gap
                )
            )
        elif h > threshold + margin and all(covered):
            violations.append(
                InclusionViolation(probe=rec.probe, h_upper_estimate=h, side="non_membership")
            )

    report = InclusionReport(
        alpha=alpha,
        margin=margin,
        total=total,
        skipped=len(records) - total,
        violations=violations,
    )
    logger.info(
        f"Inclusion check alpha={alpha}: {len(violations)} violations over {total} decided probes"
    )
    return report
