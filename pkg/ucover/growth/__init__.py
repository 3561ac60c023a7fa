"""Greedy covers of the liminf sets and second-moment checks of the witness measure."""

from ucover.bounds.formulas import transfer_matrix
from ucover.growth.greedy import (
    TRACE_COLUMNS,
    ContainmentReport,
    CoverGrowthTrace,
    RecursionReport,
    containment_check,
    greedy_cover_trace,
    recursion_check,
)
from ucover.growth.ladder import ladder, ladder_indices
from ucover.growth.moments import (
    PairIndicatorResult,
    SecondMomentReport,
    k_mass,
    pair_indicator_bound_mc,
    psi_kernel,
    psi_kernel_many,
    psi_majorant,
    second_moment_mc,
    witness_energy,
)

__all__ = [
    "transfer_matrix",
    "TRACE_COLUMNS",
    "ContainmentReport",
    "CoverGrowthTrace",
    "RecursionReport",
    "containment_check",
    "greedy_cover_trace",
    "recursion_check",
    "ladder",
    "ladder_indices",
    "PairIndicatorResult",
    "SecondMomentReport",
    "k_mass",
    "pair_indicator_bound_mc",
    "psi_kernel",
    "psi_kernel_many",
    "psi_majorant",
    "second_moment_mc",
    "witness_energy",
]
