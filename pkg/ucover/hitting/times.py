"""First hitting times of shrinking balls and the hitting exponents they estimate."""

import logging
import math
from typing import Iterator, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ucover.config import get_settings
from ucover.core import HALF, PointLike, Stream, TorusPoint, as_coords, in_open_ball, wrap_dist
from ucover.errors import ContractViolation, DomainError
from ucover.parallel import trial_map

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 1.0 / 3.0


class NotHitWithin(BaseModel):
    """The ball was not entered by omega_1..omega_n_max."""

    model_config = ConfigDict(frozen=True)

    n_max: int = Field(..., ge=0, description="Number of samples scanned")


Tau = Union[int, NotHitWithin]


class HittingRecord(BaseModel):
    """First hitting times of a probe along a halving radius ladder."""

    probe: TorusPoint
    radii: List[float] = Field(..., description="Decreasing radii r_hi 2^-j")
    taus: List[Tau] = Field(..., description="First hitting index per radius")
    h_upper_estimate: Optional[float] = Field(
        default=None, description="Max of log tau / -log r over the window of hit radii"
    )
    h_lower_estimate: Optional[float] = Field(
        default=None, description="Min of log tau / -log r over the same window"
    )
    window_fraction: float = Field(default=DEFAULT_WINDOW, gt=0, le=1)

    @property
    def hit_count(self) -> int:
        """Number of radii hit."""
        return sum(1 for tau in self.taus if isinstance(tau, int))


class ExponentStats(BaseModel):
    """Pooled statistics of the upper hitting exponent estimates."""

    count: int
    mean: Optional[float] = None
    stddev: Optional[float] = None


def _probe(y: PointLike) -> TorusPoint:
    if isinstance(y, TorusPoint):
        return y
    return TorusPoint(coords=tuple(float(v) for v in as_coords(y)))


def _check_probe(stream: Stream, y: np.ndarray) -> None:
    if y.shape != (stream.d,):
        raise ContractViolation(f"probe of dimension {y.size} for a stream on T^{stream.d}")


def _chunks(stream: Stream, n_max: int) -> Iterator[tuple]:
    """Yield (first index, points) blocks covering 1..min(n_max, capacity)."""
    chunk = get_settings().chunk_size
    last = min(n_max, stream.capacity)
    start = 1
    while start <= last:
        stop = min(start + chunk, last + 1)
        yield start, stream.block(start, stop)
        start = stop


def hitting_time(stream: Stream, y: PointLike, r: float, n_max: int) -> Tau:
    """tau(omega, y, r): the least n <= n_max with omega_n in the open ball B(y, r).

    Args:
        stream: Sample stream
        y: Ball center
        r: Radius
        n_max: Scan limit

    Returns:
        The hitting index, or NotHitWithin

    Raises:
        DomainError: If r <= 0
    """
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    if n_max < 1:
        raise ContractViolation(f"n_max must be positive, got {n_max}")
    center = as_coords(y)
    _check_probe(stream, center)
    if r >= HALF:
        return 1

    scanned = 0
    for start, points in _chunks(stream, n_max):
        hits = np.flatnonzero(wrap_dist(points, center) < r)
        if hits.size:
            return start + int(hits[0])
        scanned = start + len(points) - 1
    return NotHitWithin(n_max=scanned)


def _estimates(radii: Sequence[float], taus: Sequence[Tau], window: float) -> tuple:
    hit = [(r, tau) for r, tau in zip(radii, taus) if isinstance(tau, int)]
    if not hit:
        return None, None
    depth = max(1, math.ceil(len(hit) * window))
    ratios = [math.log(tau) / -math.log(r) for r, tau in hit[-depth:]]
    return max(ratios), min(ratios)


def hitting_ladder(
    stream: Stream,
    y: PointLike,
    r_hi: float,
    k: int,
    n_max: int,
    window: float = DEFAULT_WINDOW,
) -> HittingRecord:
    """Hitting times for radii r_hi 2^-j, j = 0..k-1, in one pass over the stream.

    Only the smallest radius not yet hit is tracked: tau is nondecreasing as r
    shrinks, so the next radius is searched from the current hitting index on.

    Args:
        stream: Sample stream
        y: Probe point
        r_hi: Largest radius, at most 1/2
        k: Number of radii, at least 2
        n_max: Scan limit
        window: Fraction of the deepest hit radii used by the estimators

    Returns:
        HittingRecord
    """
    if not 0 < r_hi <= HALF:
        raise ContractViolation(f"r_hi must lie in (0, 1/2], got {r_hi}")
    if k < 2:
        raise ContractViolation(f"ladder needs k >= 2, got {k}")
    if not 0 < window <= 1:
        raise ContractViolation(f"window fraction must lie in (0, 1], got {window}")
    probe = _probe(y)
    center = probe.array()
    _check_probe(stream, center)

    radii = [r_hi * 2.0**-j for j in range(k)]
    taus: List[Tau] = []
    scanned = 0
    for start, points in _chunks(stream, n_max):
        dist = wrap_dist(points, center)
        pos = 0
        while len(taus) < k:
            hits = np.flatnonzero(in_open_ball(dist[pos:], radii[len(taus)]))
            if not hits.size:
                break
            pos += int(hits[0])
            taus.append(start + pos)
        scanned = start + len(points) - 1
        if len(taus) == k:
            break
    taus.extend(NotHitWithin(n_max=scanned) for _ in range(k - len(taus)))

    upper, lower = _estimates(radii, taus, window)
    return HittingRecord(
        probe=probe,
        radii=radii,
        taus=taus,
        h_upper_estimate=upper,
        h_lower_estimate=lower,
        window_fraction=window,
    )


def hitting_records(
    stream: Stream,
    probes: Sequence[PointLike],
    r_hi: float,
    k: int,
    n_max: int,
    window: float = DEFAULT_WINDOW,
    threads: Optional[int] = None,
) -> List[HittingRecord]:
    """hitting_ladder for many probes, probe-parallel, in probe order."""
    records = trial_map(
        lambda y: hitting_ladder(stream, y, r_hi, k, n_max, window), list(probes), threads
    )
    logger.debug(f"Computed {len(records)} hitting ladders with k={k}, n_max={n_max}")
    return records


def pooled_exponent_stats(records: Sequence[HittingRecord]) -> ExponentStats:
    """Mean and sample standard deviation of the upper exponent estimates that exist."""
    values = np.array(
        [rec.h_upper_estimate for rec in records if rec.h_upper_estimate is not None]
    )
    if values.size == 0:
        return ExponentStats(count=0)
    stddev = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return ExponentStats(count=int(values.size), mean=float(values.mean()), stddev=stddev)


def hitting_csv_header(d: int) -> List[str]:
    """Columns y_1..y_d, r, tau, estimate."""
    return [f"y_{i + 1}" for i in range(d)] + ["r", "tau", "estimate"]


def hitting_csv_rows(records: Sequence[HittingRecord]) -> Iterator[list]:
    """One row per (probe, radius); unhit radii carry 'not_hit' in the tau column."""
    for rec in records:
        estimate = "" if rec.h_upper_estimate is None else rec.h_upper_estimate
        for r, tau in zip(rec.radii, rec.taus):
            tau_cell = tau if isinstance(tau, int) else "not_hit"
            yield [*rec.probe.coords, r, tau_cell, estimate]
