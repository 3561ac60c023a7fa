"""Box counting on grid covers."""

import logging
from typing import List

import numpy as np

from ucover.covering.grid import GridCover
from ucover.errors import ContractViolation, UndefinedDimensionError

logger = logging.getLogger(__name__)


def box_count(grid: GridCover, m_coarse: int) -> int:
    """Number of coarse boxes of side 2^-m_coarse containing at least one set cell.

    Args:
        grid: Grid cover
        m_coarse: Coarse resolution bits, 0 <= m_coarse <= grid.m

    Returns:
        Occupied coarse box count
    """
    if not 0 <= m_coarse <= grid.m:
        raise ContractViolation(f"m_coarse={m_coarse} outside [0, {grid.m}]")
    coarse = 1 << m_coarse
    fine = 1 << (grid.m - m_coarse)
    blocks = grid.cells.reshape(tuple(size for _ in range(grid.d) for size in (coarse, fine)))
    occupied = blocks.any(axis=tuple(range(1, 2 * grid.d, 2)))
    return int(np.count_nonzero(occupied))


def box_counts(grid: GridCover, m_lo: int, m_hi: int) -> List[int]:
    """Box counts for every level m_lo..m_hi inclusive."""
    return [box_count(grid, level) for level in range(m_lo, m_hi + 1)]


def estimate_box_dim(grid: GridCover, m_lo: int, m_hi: int) -> float:
    """Least-squares slope of log2 box_count(m') against m' over m_lo..m_hi.

    Args:
        grid: Grid cover
        m_lo: Coarsest level
        m_hi: Finest level, m_lo < m_hi <= grid.m

    Returns:
        Slope clipped to [0, d]

    Raises:
        UndefinedDimensionError: If the grid is empty
    """
    if not 0 <= m_lo < m_hi <= grid.m:
        raise ContractViolation(f"need 0 <= m_lo < m_hi <= {grid.m}, got {m_lo}, {m_hi}")
    if grid.count == 0:
        raise UndefinedDimensionError("box-counting dimension of an empty grid is undefined")

    levels = np.arange(m_lo, m_hi + 1, dtype=np.float64)
    counts = np.asarray(box_counts(grid, m_lo, m_hi), dtype=np.float64)
    slope = float(np.polyfit(levels, np.log2(counts), 1)[0])
    return float(np.clip(slope, 0.0, grid.d))
