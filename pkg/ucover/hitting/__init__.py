"""Hitting times, hitting exponents and the inclusion check."""

from ucover.hitting.inclusion import InclusionReport, InclusionViolation, inclusion_check
from ucover.hitting.times import (
    ExponentStats,
    HittingRecord,
    NotHitWithin,
    hitting_ladder,
    hitting_records,
    hitting_time,
    pooled_exponent_stats,
)

__all__ = [
    "InclusionReport",
    "InclusionViolation",
    "inclusion_check",
    "ExponentStats",
    "HittingRecord",
    "NotHitWithin",
    "hitting_ladder",
    "hitting_records",
    "hitting_time",
    "pooled_exponent_stats",
]
