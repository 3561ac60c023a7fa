"""Second-moment quantities of the liminf witness measure and their Monte Carlo checks."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ucover.bounds.formulas import c_constant, critical_c, energy_constant, s_exponent
from ucover.config import get_settings
from ucover.core import (
    HALF,
    CriticalScale,
    PointLike,
    SampleStream,
    UniformTorus,
    as_coords,
    in_open_ball,
    wrap_dist,
)
from ucover.covering.grid import GridCover, liminf_witness_grid
from ucover.errors import ContractViolation, DomainError, NumericError, PreconditionError
from ucover.growth.ladder import ladder_indices
from ucover.parallel import trial_map, trial_seeds

logger = logging.getLogger(__name__)

BAND_DELTA = 0.5
MIN_PAIR_TRIALS = 1000


def level_factors(
    theta: float, c: float, d: int, l: int, q: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-level quantities for j = l..q.

    Returns:
        (radii l_{n_{j+1}}, misses (1 - p_j)^(n_j - n_{j-1}), hits 1 - misses)
        with p_j = min(1, (2 l_{n_{j+1}})^d)
    """
    if l < 1 or q < l:
        raise DomainError(f"need 1 <= l <= q, got l={l}, q={q}")
    n = ladder_indices(theta, q + 1)
    schedule = CriticalScale(c=c, d=d)
    radii = np.array([schedule.radius_at(n[j + 1]) for j in range(l, q + 1)])
    widths = np.array([n[j] - n[j - 1] for j in range(l, q + 1)], dtype=np.float64)
    mass = np.where(radii >= HALF, 1.0, np.minimum(1.0, (2.0 * radii) ** d))

    with np.errstate(divide="ignore"):
        log_miss = widths * np.log1p(-mass)
    misses = np.exp(log_miss)
    hits = -np.expm1(log_miss)
    return radii, misses, hits


def psi_kernel(t: PointLike, theta: float, c: float, d: int, l: int, q: int) -> float:
    """Psi_{l,q}(t): the product over j of 1 + misses_j / hits_j on the ball |t| < l_{n_{j+1}}.

    Raises:
        NumericError: If some level has no chance of a hit
    """
    return float(psi_kernel_many(np.atleast_2d(as_coords(t)), theta, c, d, l, q)[0])


def psi_kernel_many(t: np.ndarray, theta: float, c: float, d: int, l: int, q: int) -> np.ndarray:
    """Vectorized psi_kernel over rows of t, shape (n, d)."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 2 or t.shape[1] != d:
        raise ContractViolation(f"offsets must have shape (n, {d}), got {t.shape}")
    radii, misses, hits = level_factors(theta, c, d, l, q)
    if np.any(hits <= 0.0):
        raise NumericError(f"a level of the ladder for theta={theta} is never hit", theta=theta)

    norm = wrap_dist(t, np.zeros(d))
    psi = np.ones(t.shape[0])
    for radius, miss, hit in zip(radii, misses, hits):
        psi *= np.where(in_open_ball(norm, radius), 1.0 + miss / hit, 1.0)
    return psi


def psi_majorant(t: PointLike, theta: float, c: float, d: int, l: int) -> float:
    """1 + C_l |t|^(-s(c, theta))."""
    norm = float(wrap_dist(as_coords(t), np.zeros(d)))
    if norm == 0.0:
        return math.inf
    return 1.0 + c_constant(c, d, theta, l) * norm ** (-s_exponent(c, d, theta))


def k_mass(theta: float, c: float, d: int, l: int, q: int) -> float:
    """K_{l,q}: expected Lebesgue mass of the witness set, a product of per-level hit chances."""
    _, _, hits = level_factors(theta, c, d, l, q)
    return float(np.prod(hits))


class PairIndicatorResult(BaseModel):
    """Monte Carlo estimate of E[1_B(omega,l)(x) 1_B(omega,l)(y)] against its bounds."""

    trials: int
    estimate: float
    stderr: float
    exact: float = Field(..., description="Overlap volume of the two balls")
    bound: float = Field(..., description="(2l)^d 1{|x-y| < 2l}")
    complement_estimate: float = Field(..., description="E[(1 - 1_x)(1 - 1_y)]")
    complement_bound: float = Field(..., description="1 - 2(2l)^d + bound")

    @property
    def within_bound(self) -> bool:
        """Estimate below the bound up to three standard errors."""
        return self.estimate <= self.bound + 3.0 * self.stderr


def _overlap(delta: float, r: float) -> float:
    """Length of the intersection of two arcs of length 2r whose centers are delta apart."""
    if r >= HALF:
        return 1.0
    return max(0.0, 2.0 * r - delta) + max(0.0, 2.0 * r - (1.0 - delta))


def pair_indicator_bound_mc(
    x: PointLike, y: PointLike, ell: float, trials: int, seed: int = 0
) -> PairIndicatorResult:
    """Estimate the joint hit probability of two points by one uniform ball center.

    Args:
        x: First point
        y: Second point
        ell: Ball radius
        trials: Number of uniform draws, at least 1000
        seed: Stream seed

    Returns:
        PairIndicatorResult
    """
    if trials < MIN_PAIR_TRIALS:
        raise ContractViolation(f"need at least {MIN_PAIR_TRIALS} trials, got {trials}")
    if not ell > 0:
        raise DomainError(f"radius must be positive, got {ell}")
    a, b = as_coords(x), as_coords(y)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a.size

    omega = SampleStream(seed, UniformTorus(d=d)).block(1, trials + 1)
    in_x = in_open_ball(wrap_dist(omega, a), ell)
    in_y = in_open_ball(wrap_dist(omega, b), ell)
    both = (in_x & in_y).astype(np.float64)
    neither = (~in_x & ~in_y).astype(np.float64)

    gaps = np.abs(a - b) % 1.0
    gaps = np.minimum(gaps, 1.0 - gaps)
    exact = float(np.prod([_overlap(g, ell) for g in gaps]))
    mass = min(1.0, (2.0 * ell) ** d)
    bound = mass if float(np.max(gaps)) < 2.0 * ell else 0.0
    return PairIndicatorResult(
        trials=trials,
        estimate=float(both.mean()),
        stderr=float(both.std(ddof=1) / math.sqrt(trials)),
        exact=exact,
        bound=bound,
        complement_estimate=float(neither.mean()),
        complement_bound=1.0 - 2.0 * mass + bound,
    )


def witness_energy(grid: GridCover, s: float) -> float:
    """Grid estimate of the s-energy of Lebesgue measure restricted to the set cells.

    Sums |x - y|^(-s) over ordered pairs of distinct set cells, with cell-center
    distances floored at half a cell, weighted by the squared cell volume.
    """
    if s < 0:
        raise DomainError(f"energy exponent must be nonnegative, got {s}")
    centers = grid.centers()
    count = centers.shape[0]
    if count < 2:
        return 0.0

    floor = 2.0 ** -(grid.m + 1)
    rows = max(1, get_settings().chunk_size // count)
    total = 0.0
    for start in range(0, count, rows):
        block = centers[start : start + rows]
        dist = wrap_dist(block[:, None, :], centers[None, :, :])
        dist = np.maximum(dist, floor)
        kernel = dist ** (-s)
        kernel[np.arange(block.shape[0]), np.arange(start, start + block.shape[0])] = 0.0
        total += float(kernel.sum())
    return total * (1.0 / grid.cells.size) ** 2


class SecondMomentReport(BaseModel):
    """Monte Carlo moments of the witness mass and energy against their bounds."""

    c: float
    d: int
    theta: float
    l: int
    q: int
    m: int
    s: float
    trials: int
    k_mass: float = Field(..., description="Expected mass K_{l,q}")
    mass_mean: float
    mass_var: float
    mass_stderr: float
    mass_rel_error: float = Field(..., description="|mean - K| / K")
    mass_matches_k: bool = Field(..., description="|mean - K| within max(5% K, 4 stderr)")
    second_moment: float = Field(..., description="Trial mean of mass^2")
    second_moment_bound: Optional[float] = Field(
        default=None, description="K^2 (1 + C_l I_{s(c,theta)}), when s(c,theta) < d"
    )
    second_moment_ok: Optional[bool] = None
    energy_mean: Optional[float] = None
    energy_bound: Optional[float] = Field(
        default=None, description="K^2 (I_s + C_l I_{s + s(c,theta)})"
    )
    energy_ok: Optional[bool] = None
    band_delta: float = BAND_DELTA
    band_fraction: float = Field(..., description="Trials with mass in (delta K, (2 - delta) K)")
    hypothesis_holds: bool = Field(..., description="0 < s < d - s(c,theta) and c above critical")
    masses: List[float] = Field(default_factory=list)


def _hypothesis(c: float, d: int, theta: float, s: float) -> Tuple[bool, str]:
    s_ct = s_exponent(c, d, theta)
    if not 0.0 < s < d - s_ct:
        return False, f"need 0 < s < d - s(c,theta) = {d - s_ct:.6g}, got s={s}"
    c_min = critical_c(theta, d)
    if not c > c_min:
        return False, f"need c > {c_min:.6g} at theta={theta}, got c={c}"
    return True, ""


def second_moment_mc(
    c: float,
    d: int,
    theta: float,
    l: int,
    q: int,
    m: int,
    trials: int,
    s: float,
    seed: int = 1,
    strict: bool = True,
    threads: Optional[int] = None,
) -> SecondMomentReport:
    """Mass and energy of the witness grid over independent trials.

    Args:
        c: Scale constant
        d: Dimension
        theta: Ladder ratio
        l: First ladder level
        q: Last ladder level
        m: Resolution bits per axis
        trials: Number of independent streams
        s: Energy exponent
        seed: Base seed; trial t uses substream t
        strict: Raise when the energy hypothesis fails instead of reporting it
        threads: Worker threads

    Returns:
        SecondMomentReport

    Raises:
        PreconditionError: If strict and s or c violate the energy hypothesis
    """
    if trials < 1:
        raise ContractViolation(f"need at least one trial, got {trials}")
    holds, reason = _hypothesis(c, d, theta, s)
    if not holds and strict:
        raise PreconditionError(f"energy bound hypothesis fails: {reason}")
    if not holds:
        logger.warning(f"Energy bound hypothesis fails, bounds not reported: {reason}")

    def run(trial_seed: int) -> Tuple[float, float]:
        stream = SampleStream(trial_seed, UniformTorus(d=d))
        grid = liminf_witness_grid(stream, c, d, theta, l, q, m)
        return grid.mass, witness_energy(grid, s) if holds else math.nan

    logger.info(f"Second-moment run c={c} d={d} theta={theta} l={l} q={q}: {trials} trials")
    outcomes = trial_map(run, trial_seeds(seed, trials), threads)
    masses = np.array([mass for mass, _ in outcomes])
    k = k_mass(theta, c, d, l, q)

    mass_mean = float(masses.mean())
    mass_var = float(masses.var(ddof=1)) if trials > 1 else 0.0
    stderr = math.sqrt(mass_var / trials)
    second = float(np.mean(masses**2))
    lower, upper = BAND_DELTA * k, (2.0 - BAND_DELTA) * k
    band = float(np.mean((masses > lower) & (masses < upper)))

    second_bound = energy_mean = energy_bound = None
    second_ok = energy_ok = None
    if holds:
        s_ct = s_exponent(c, d, theta)
        c_l = c_constant(c, d, theta, l)
        second_bound = k**2 * (1.0 + c_l * energy_constant(s_ct, d))
        sem_second = float(np.std(masses**2, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        second_ok = second <= second_bound + 3.0 * sem_second

        energies = np.array([energy for _, energy in outcomes])
        energy_mean = float(energies.mean())
        energy_bound = k**2 * (energy_constant(s, d) + c_l * energy_constant(s + s_ct, d))
        sem_energy = float(np.std(energies, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        energy_ok = energy_mean <= energy_bound + 3.0 * sem_energy

    report = SecondMomentReport(
        c=c,
        d=d,
        theta=theta,
        l=l,
        q=q,
        m=m,
        s=s,
        trials=trials,
        k_mass=k,
        mass_mean=mass_mean,
        mass_var=mass_var,
        mass_stderr=stderr,
        mass_rel_error=abs(mass_mean - k) / k if k > 0 else 0.0,
        mass_matches_k=abs(mass_mean - k) <= max(0.05 * k, 4.0 * stderr),
        second_moment=second,
        second_moment_bound=second_bound,
        second_moment_ok=second_ok,
        energy_mean=energy_mean,
        energy_bound=energy_bound,
        energy_ok=energy_ok,
        band_fraction=band,
        hypothesis_holds=holds,
        masses=masses.tolist(),
    )
    logger.info(
        f"Mass mean {mass_mean:.6g} vs K {k:.6g} (rel. error {report.mass_rel_error:.3f}, "
        f"{band:.0%} of trials in band)"
    )
    return report
