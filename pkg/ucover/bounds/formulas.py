"""Closed-form constants for the critical family l_n = c n^(-1/d)."""

import math
from typing import NamedTuple

import numpy as np

from ucover.errors import DomainError


class TransferEntries(NamedTuple):
    """Entries and top eigenvalue of the count-recursion matrix [[1+Theta, Theta], [Delta, Delta]]."""

    big_theta: float
    delta: float
    lam: float


def _check_theta(theta: float) -> None:
    if not theta > 1.0:
        raise DomainError(f"theta must exceed 1, got {theta}")


def _log_one_minus_exp(x: float) -> float:
    """log(1 - e^-x) for x > 0 without cancellation at either end."""
    if x > math.log(2.0):
        return math.log1p(-math.exp(-x))
    return math.log(-math.expm1(-x))


def coverage_rate(c: float, d: int, theta: float) -> float:
    """x = (2c)^d (theta - 1) / theta^2, the expected coverage per ladder level."""
    return (2.0 * c) ** d * (theta - 1.0) / theta**2


def s_exponent(c: float, d: int, theta: float) -> float:
    """s(c, theta) = -d log(1 - e^-x) / log theta with x = coverage_rate(c, d, theta).

    Raises:
        DomainError: If theta <= 1
    """
    _check_theta(theta)
    return -d * _log_one_minus_exp(coverage_rate(c, d, theta)) / math.log(theta)


def c_constant(c: float, d: int, theta: float, l: int) -> float:
    """C_l = c^s (1 - e^-x)^l, the constant of the Psi majorant 1 + C_l |t|^-s."""
    s = s_exponent(c, d, theta)
    return c**s * math.exp(l * _log_one_minus_exp(coverage_rate(c, d, theta)))


def lambda_matrix(c: float, d: int, theta: float) -> TransferEntries:
    """Theta, Delta and the larger eigenvalue Lambda of [[1+Theta, Theta], [Delta, Delta]].

    Raises:
        DomainError: If theta <= 1
    """
    _check_theta(theta)
    big_theta = (theta - 1.0) * (2.0 * c * (1.0 + theta ** (-2.0 / d))) ** d
    delta = (
        (theta - 1.0)
        * 2.0**d
        * c**d
        * ((1.0 + theta ** (-1.0 / d)) ** d - (1.0 + theta ** (-2.0 / d)) ** d)
    )
    half_trace = (1.0 + big_theta + delta) / 2.0
    lam = half_trace + math.sqrt(half_trace**2 - delta)
    return TransferEntries(big_theta=big_theta, delta=delta, lam=lam)


def transfer_matrix(c: float, d: int, theta: float) -> np.ndarray:
    """The 2x2 count-recursion matrix."""
    entries = lambda_matrix(c, d, theta)
    return np.array(
        [[1.0 + entries.big_theta, entries.big_theta], [entries.delta, entries.delta]]
    )


def energy_constant(s: float, d: int) -> float:
    """s-energy of Lebesgue measure on T^d under the max norm: d 2^s / (d - s).

    Raises:
        DomainError: Unless 0 < s < d
    """
    if not 0.0 < s < d:
        raise DomainError(f"energy constant needs 0 < s < d, got s={s}, d={d}")
    return d * 2.0**s / (d - s)


def critical_c(theta: float, d: int) -> float:
    """Smallest c allowed by the second-moment argument at this theta.

    Returns 1/2 (-theta^2/(theta-1) log(1 - 1/theta))^(1/d), which decreases
    to 1/2 as theta grows.

    Raises:
        DomainError: If theta <= 1
    """
    _check_theta(theta)
    inner = -(theta**2) / (theta - 1.0) * math.log1p(-1.0 / theta)
    return 0.5 * inner ** (1.0 / d)
