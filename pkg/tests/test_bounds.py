"""Tests for the closed-form constants, the theta optimizer and the dimension bounds."""

import math

import numpy as np
import pytest
from scipy import integrate

from ucover.bounds import (
    LIMIT_AT_INFINITY,
    Regime,
    bound_report,
    c_constant,
    coverage_rate,
    critical_c,
    energy_constant,
    golden_section,
    lambda_matrix,
    lower_bound_dim,
    optimize_theta,
    s_exponent,
    theta_grid,
    transfer_matrix,
    upper_bound_dim,
)
from ucover.errors import DomainError, NumericError

C_GRID = [round(0.05 * k, 2) for k in range(1, 41)]


def dense_theta(points=200_000):
    return 1.0 + np.geomspace(1e-6, 1e6 - 1.0, points)


# ---------------------------------------------------------------------------
# s(c, theta)
# ---------------------------------------------------------------------------


def test_s_exponent_examples():
    closed_form = -math.log(-math.expm1(-0.5)) / math.log(2)
    assert s_exponent(1.0, 1, 2.0) == pytest.approx(closed_form, rel=1e-12)
    assert s_exponent(1.0, 1, 2.0) == pytest.approx(1.3458, abs=2e-4)
    expected = -2 * math.log(1 - math.exp(-4 * 3 / 16)) / math.log(4)
    assert s_exponent(1.0, 2, 4.0) == pytest.approx(expected, rel=1e-12)
    assert s_exponent(1.0, 2, 4.0) == pytest.approx(0.9224, abs=1e-4)


def test_s_exponent_vanishes_for_large_c():
    assert 0 < s_exponent(50.0, 1, 2.0) < 1e-6


@pytest.mark.parametrize("theta", [1.0, 0.5, -2.0])
def test_s_exponent_domain(theta):
    with pytest.raises(DomainError):
        s_exponent(1.0, 1, theta)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_s_exponent_decreases_in_c(d):
    cs = np.linspace(0.05, 2.0, 20)
    for theta in np.geomspace(1.1, 1e3, 20):
        values = [s_exponent(float(c), d, float(theta)) for c in cs]
        assert all(b < a for a, b in zip(values, values[1:]))


def test_s_exponent_accurate_for_tiny_coverage():
    x = coverage_rate(1e-3, 1, 1e6)
    expected = -math.log(x) / math.log(1e6)
    assert s_exponent(1e-3, 1, 1e6) == pytest.approx(expected, rel=1e-6)


def test_c_constant():
    x = coverage_rate(1.0, 1, 2.0)
    s = s_exponent(1.0, 1, 2.0)
    assert c_constant(1.0, 1, 2.0, 3) == pytest.approx((1 - math.exp(-x)) ** 3, rel=1e-12)
    assert c_constant(2.0, 1, 2.0, 1) == pytest.approx(
        2.0 ** s_exponent(2.0, 1, 2.0) * (1 - math.exp(-coverage_rate(2.0, 1, 2.0)))
    )
    assert s > 0


# ---------------------------------------------------------------------------
# Lambda
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "c,d,theta,big_theta,delta,lam",
    [
        (0.1, 1, 4.0, 0.6375, 0.1125, 1.68316),
        (0.5, 1, 2.0, 1.25, 0.25, 2.39564),
    ],
)
def test_lambda_matrix_examples(c, d, theta, big_theta, delta, lam):
    entries = lambda_matrix(c, d, theta)
    assert entries.big_theta == pytest.approx(big_theta, rel=1e-12)
    assert entries.delta == pytest.approx(delta, rel=1e-12)
    assert entries.lam == pytest.approx(lam, abs=1e-5)
    top = max(abs(np.linalg.eigvals(transfer_matrix(c, d, theta))))
    assert entries.lam == pytest.approx(top, rel=1e-12)


def test_lambda_characteristic_polynomial():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        c = float(rng.uniform(0.05, 3.0))
        d = int(rng.integers(1, 5))
        theta = float(np.exp(rng.uniform(math.log(1.01), math.log(1e4))))
        big_theta, delta, lam = lambda_matrix(c, d, theta)
        residual = lam**2 - (1 + big_theta + delta) * lam + delta
        assert abs(residual) <= 1e-10 * lam**2
        assert lam >= (1 + big_theta) * (1 - 1e-12)


def test_lambda_near_one():
    entries = lambda_matrix(1.0, 1, 1.0 + 1e-9)
    assert entries.big_theta < 1e-8
    assert entries.lam == pytest.approx(1.0, abs=1e-8)


def test_lambda_domain():
    with pytest.raises(DomainError):
        lambda_matrix(1.0, 1, 1.0)


# ---------------------------------------------------------------------------
# Energy constant and critical c
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("s,d,expected", [(0.5, 1, 2 * math.sqrt(2)), (1.0, 2, 4.0)])
def test_energy_constant_examples(s, d, expected):
    assert energy_constant(s, d) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("s,d", [(1.0, 1), (0.0, 2), (-0.5, 1), (3.0, 2)])
def test_energy_constant_domain(s, d):
    with pytest.raises(DomainError):
        energy_constant(s, d)


@pytest.mark.parametrize("s,d", [(0.3, 1), (0.5, 1), (0.9, 1), (0.5, 2), (1.5, 2), (2.5, 3)])
def test_energy_constant_matches_quadrature(s, d):
    # The max-norm sphere of radius rho in T^d has surface 2d (2 rho)^(d-1).
    value, _ = integrate.quad(
        lambda rho: 2 * d * (2 * rho) ** (d - 1) * rho ** (-s), 0.0, 0.5, limit=200
    )
    assert energy_constant(s, d) == pytest.approx(value, abs=1e-3)


def test_energy_constant_closed_form_grid():
    for d in range(1, 6):
        for s in np.linspace(0.05, d - 0.05, 50):
            assert energy_constant(float(s), d) == pytest.approx(d * 2**s / (d - s), rel=1e-12)


@pytest.mark.parametrize(
    "theta,d,expected", [(2.0, 1, 2 * math.log(2)), (2.0, 2, 0.5 * math.sqrt(4 * math.log(2)))]
)
def test_critical_c_examples(theta, d, expected):
    assert critical_c(theta, d) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_critical_c_decreases_to_half(d):
    values = [critical_c(theta, d) for theta in (2.0, 10.0, 1e2, 1e4)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert all(v > 0.5 for v in values)
    assert critical_c(1e12, d) == pytest.approx(0.5, abs=1e-6)


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------


def test_theta_grid_spans_bracket():
    grid = theta_grid()
    assert grid[0] == pytest.approx(1 + 1e-6, rel=1e-12)
    assert grid[-1] == pytest.approx(1e6, rel=1e-12)
    assert np.all(np.diff(grid) > 0)


def test_golden_section_quadratic():
    assert golden_section(lambda t: (t - 3.0) ** 2, 1.0, 10.0) == pytest.approx(3.0, abs=1e-8)


def test_optimize_theta_quadratic():
    best = optimize_theta(lambda t: (t - 3.0) ** 2)
    assert best.theta == pytest.approx(3.0, abs=1e-8)
    assert best.value == pytest.approx(0.0, abs=1e-15)
    assert not best.at_limit


def test_optimize_theta_max_mode():
    best = optimize_theta(lambda t: -((math.log(t) - 1.0) ** 2), mode="max")
    assert best.theta == pytest.approx(math.e, rel=1e-7)


def test_optimize_theta_edge():
    best = optimize_theta(lambda t: 1.0 / t)
    assert best.at_limit
    assert best.theta == pytest.approx(1e6)


def test_optimize_theta_rejects_non_finite():
    with pytest.raises(NumericError) as excinfo:
        optimize_theta(lambda t: math.inf if t > 100 else 1.0)
    assert excinfo.value.theta > 100


def test_optimize_theta_mode():
    with pytest.raises(DomainError):
        optimize_theta(lambda t: t, mode="avg")


# ---------------------------------------------------------------------------
# Dimension bounds
# ---------------------------------------------------------------------------


def test_lower_bound_examples():
    value, theta = lower_bound_dim(1.0, 1)
    assert value == pytest.approx(0.2177, abs=1e-3)
    assert theta == pytest.approx(8.5, abs=0.75)

    value, theta = lower_bound_dim(1.0, 2)
    assert value == pytest.approx(1.078, abs=2e-3)
    assert theta == pytest.approx(4.2, abs=0.5)


def test_lower_bound_subcritical_is_zero():
    assert lower_bound_dim(0.4, 1) == (0.0, LIMIT_AT_INFINITY)
    assert lower_bound_dim(0.5, 2) == (0.0, LIMIT_AT_INFINITY)


def test_upper_bound_examples():
    value, theta = upper_bound_dim(0.1, 1)
    assert value == pytest.approx(0.333, abs=2e-3)
    assert theta == pytest.approx(1.9, abs=0.3)
    assert upper_bound_dim(0.5, 1) == (1.0, LIMIT_AT_INFINITY)
    value, _ = upper_bound_dim(0.2, 2)
    assert 0.0 < value < 2.0


@pytest.mark.parametrize("c,d", [(1.0, 1), (0.8, 2), (1.5, 3)])
def test_lower_bound_matches_dense_scan(c, d):
    dense = max(d - s_exponent(c, d, float(t)) for t in dense_theta())
    assert lower_bound_dim(c, d)[0] == pytest.approx(max(0.0, dense), abs=1e-3)


@pytest.mark.parametrize("c,d", [(0.1, 1), (0.3, 2)])
def test_upper_bound_matches_dense_scan(c, d):
    dense = min(
        d * math.log(lambda_matrix(c, d, float(t)).lam) / math.log(float(t))
        for t in dense_theta()
    )
    assert upper_bound_dim(c, d)[0] == pytest.approx(min(float(d), dense), abs=1e-3)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_bound_sign_table(d):
    lowers, uppers = [], []
    for c in C_GRID:
        lower, _ = lower_bound_dim(c, d)
        upper, _ = upper_bound_dim(c, d)
        assert 0.0 <= lower <= upper <= d
        if c <= 0.5:
            assert lower == 0.0
        else:
            assert lower > 1e-3
        if c < 0.5:
            assert 1e-3 < upper < d - 1e-3
        else:
            assert upper == pytest.approx(d, abs=1e-6)
        lowers.append(lower)
        uppers.append(upper)
    assert all(b >= a - 1e-7 for a, b in zip(lowers, lowers[1:]))
    assert all(b >= a - 1e-7 for a, b in zip(uppers, uppers[1:]))


def test_bounds_reject_bad_parameters():
    with pytest.raises(DomainError):
        lower_bound_dim(0.0, 1)
    with pytest.raises(DomainError):
        upper_bound_dim(1.0, 0)


@pytest.mark.parametrize(
    "c,regime", [(0.3, Regime.SUBCRITICAL), (0.5, Regime.CRITICAL), (2, Regime.SUPERCRITICAL)]
)
def test_regime(c, regime):
    assert Regime.of(c) is regime


def test_bound_report():
    report = bound_report(1.0, 1)
    assert report.regime is Regime.SUPERCRITICAL
    assert report.lower_bound == pytest.approx(0.2177, abs=1e-3)
    assert report.upper_bound == 1.0
    assert report.theta_star_upper == LIMIT_AT_INFINITY
    assert report.s_at_theta_star == pytest.approx(1 - report.lower_bound, abs=1e-9)
    dumped = report.model_dump(mode="json")
    assert dumped["regime"] == "supercritical"
    assert dumped["theta_star_upper"] == "limit_at_infinity"


def test_bound_report_subcritical():
    report = bound_report(0.1, 1)
    assert report.lower_bound == 0.0
    assert report.theta_star_lower == LIMIT_AT_INFINITY
    assert isinstance(report.theta_star_upper, float)
    assert report.lambda_at_theta_star == pytest.approx(
        lambda_matrix(0.1, 1, report.theta_star_upper).lam
    )
