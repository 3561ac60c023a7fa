"""Cross-seed concentration probes of almost-sure constancy."""

import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ucover.config import ExperimentConfig
from ucover.core import SampleStream
from ucover.covering.boxdim import estimate_box_dim
from ucover.covering.grid import CAVEAT, GridCover, build_cover_grid, dyadic_ladder
from ucover.errors import ContractViolation, UndefinedDimensionError
from ucover.parallel import trial_map

logger = logging.getLogger(__name__)


class SeedOutcome(BaseModel):
    """Statistic of one seed."""

    seed: int
    value: float
    covered_fraction: float
    empty: bool = Field(default=False, description="Grid had no set cell")


class ProbeResult(BaseModel):
    """Spread of a statistic across seeds."""

    statistic: str
    outcomes: List[SeedOutcome]
    values: List[float]
    mean: float
    stddev: float
    caveat: str = CAVEAT


def experiment_grid(config: ExperimentConfig, seed: int) -> GridCover:
    """Build the cover grid of an experiment for one seed."""
    stream = SampleStream(seed, config.build_measure())
    return build_cover_grid(
        stream,
        config.build_schedule(),
        config.p,
        dyadic_ladder(config.p, config.n_max),
        config.m,
    )


def grid_statistic(grid: GridCover, config: ExperimentConfig) -> float:
    """Evaluate the configured statistic on a grid.

    An empty grid has box dimension 0 here (finite and empty sets both have
    dimension 0); estimate_box_dim itself keeps the distinction.
    """
    if config.statistic == "covered_fraction":
        return grid.mass
    if config.statistic == "full_cover":
        return 1.0 if grid.count == grid.cells.size else 0.0
    m_lo, m_hi = config.box_window()
    try:
        return estimate_box_dim(grid, m_lo, m_hi)
    except UndefinedDimensionError:
        return 0.0


def zero_one_probe(
    config: ExperimentConfig, seeds: Sequence[int], threads: Optional[int] = None
) -> ProbeResult:
    """Run the same experiment for every seed and report the spread of its statistic.

    Args:
        config: Experiment description
        seeds: At least two 64-bit seeds
        threads: Worker threads (default: settings)

    Returns:
        Per-seed values with mean and sample standard deviation
    """
    seeds = [int(s) for s in seeds]
    if len(seeds) < 2:
        raise ContractViolation("zero_one_probe needs at least two seeds")

    logger.info(f"Zero-one probe: {config.statistic} over {len(seeds)} seeds")

    def run(seed: int) -> SeedOutcome:
        grid = experiment_grid(config, seed)
        value = grid_statistic(grid, config)
        return SeedOutcome(
            seed=seed, value=value, covered_fraction=grid.mass, empty=grid.count == 0
        )

    outcomes = trial_map(run, seeds, threads)
    values = [o.value for o in outcomes]
    result = ProbeResult(
        statistic=config.statistic,
        outcomes=outcomes,
        values=values,
        mean=float(np.mean(values)),
        stddev=float(np.std(values, ddof=1)),
    )
    logger.info(f"Zero-one probe done: mean={result.mean:.4f} stddev={result.stddev:.4f}")
    return result
