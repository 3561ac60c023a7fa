"""Empirical covered fraction of a finite-window covering set."""

import logging

from ucover.core import ScheduleBase, Stream
from ucover.covering.grid import build_cover_grid, covered_fraction, dyadic_ladder

logger = logging.getLogger(__name__)


def empirical_covered_fraction(
    stream: Stream, schedule: ScheduleBase, p: int, N: int, m: int
) -> float:
    """Fraction of grid cells covered at every dyadic checkpoint from p to N.

    Args:
        stream: Sample stream
        schedule: Radius schedule
        p: Tail index
        N: Last checkpoint
        m: Resolution bits per axis

    Returns:
        Fraction in [0, 1]
    """
    grid = build_cover_grid(stream, schedule, p, dyadic_ladder(p, N), m)
    fraction = covered_fraction(grid)
    logger.debug(f"Covered fraction over [{p}, {N}] at m={m}: {fraction:.6f}")
    return fraction
