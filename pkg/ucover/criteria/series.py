"""Partial sums of the series that decide the dichotomy."""

from typing import Iterator, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ucover.core import HALF, MeasureBase, ScheduleBase
from ucover.errors import ContractViolation

SERIES_COLUMNS = ["n", "term1", "term2", "term3", "partial1", "partial2", "partial3"]
MIN_TERMS = 10


class SeriesDiagnostics(BaseModel):
    """Partial sums up to N and fitted tail exponents of the three series."""

    n: int = Field(..., description="Number of terms summed")
    partial_first: float = Field(..., description="sum m_n")
    partial_second: float = Field(..., description="sum m_n exp(-n m_n)")
    partial_countability: float = Field(..., description="sum n m(l_n + l_{n+1})")
    exponent_first: Optional[float] = Field(default=None, description="Tail slope of log term1")
    exponent_second: Optional[float] = Field(default=None, description="Tail slope of log term2")
    exponent_countability: Optional[float] = Field(
        default=None, description="Tail slope of log term3"
    )


def mass_of_radius(radii: np.ndarray, k: int) -> np.ndarray:
    """Ball mass min(1, (2r)^k) of a homogeneous measure, 1 from radius 1/2 on."""
    radii = np.asarray(radii, dtype=np.float64)
    return np.where(radii >= HALF, 1.0, np.minimum(1.0, (2.0 * radii) ** k))


def _term_count(schedule: ScheduleBase, N: int) -> int:
    if schedule.length is not None:
        if N < 1:
            raise ContractViolation(f"N must be positive, got {N}")
        return min(N, schedule.length)
    if N < MIN_TERMS:
        raise ContractViolation(f"N must be at least {MIN_TERMS}, got {N}")
    return N


def series_terms(schedule: ScheduleBase, measure: MeasureBase, N: int) -> np.ndarray:
    """Terms of the three series for n = 1..N.

    For an explicit schedule N is cut at its length, and the last term of the
    countability series reuses l_N in place of the missing l_{N+1}.

    Returns:
        Array of shape (N, 3)
    """
    N = _term_count(schedule, N)
    k = measure.support_dim
    n = np.arange(1, N + 1, dtype=np.int64)
    radii = schedule.radii(n)
    if schedule.length is not None and N == schedule.length:
        following = np.append(radii[1:], radii[-1])
    else:
        following = schedule.radii(n + 1)

    masses = mass_of_radius(radii, k)
    nf = n.astype(np.float64)
    terms = np.empty((N, 3))
    terms[:, 0] = masses
    terms[:, 1] = masses * np.exp(-nf * masses)
    terms[:, 2] = nf * mass_of_radius(radii + following, k)
    return terms


def _tail_exponent(terms: np.ndarray) -> Optional[float]:
    N = terms.shape[0]
    if N < MIN_TERMS:
        return None
    n = np.arange(1, N + 1, dtype=np.float64)
    window = n > N / 10.0
    window &= terms > 0.0
    if np.count_nonzero(window) < 2:
        return None
    slope, _ = np.polyfit(np.log(n[window]), np.log(terms[window]), 1)
    return float(slope)


def series_partial_diagnostics(
    schedule: ScheduleBase, measure: MeasureBase, N: int
) -> SeriesDiagnostics:
    """Partial sums and last-decade log-log slopes; diagnostics only, never a verdict.

    Args:
        schedule: Radius schedule
        measure: Homogeneous sampling measure
        N: Number of terms (at least 10 for symbolic schedules)

    Returns:
        SeriesDiagnostics
    """
    terms = series_terms(schedule, measure, N)
    partial = terms.sum(axis=0)
    return SeriesDiagnostics(
        n=terms.shape[0],
        partial_first=float(partial[0]),
        partial_second=float(partial[1]),
        partial_countability=float(partial[2]),
        exponent_first=_tail_exponent(terms[:, 0]),
        exponent_second=_tail_exponent(terms[:, 1]),
        exponent_countability=_tail_exponent(terms[:, 2]),
    )


def series_csv_rows(terms: np.ndarray, stride: int = 1) -> Iterator[List[float]]:
    """Rows (n, term1..3, partial1..3) for every stride-th n, always ending at N."""
    partial = np.cumsum(terms, axis=0)
    N = terms.shape[0]
    picks: List[int] = list(range(stride - 1, N, stride))
    if not picks or picks[-1] != N - 1:
        picks.append(N - 1)
    for i in picks:
        yield [i + 1, *terms[i].tolist(), *partial[i].tolist()]

