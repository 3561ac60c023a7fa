"""Tests for ladders, the greedy cover construction and the second-moment machinery."""

import math

import numpy as np
import pytest

from ucover.bounds import c_constant, lambda_matrix, s_exponent
from ucover.core import SampleStream, UniformTorus
from ucover.covering import GridCover
from ucover.errors import (
    ContractViolation,
    DomainError,
    NumericError,
    PreconditionError,
    ResourceLimitError,
)
from ucover.growth import (
    TRACE_COLUMNS,
    containment_check,
    greedy_cover_trace,
    k_mass,
    ladder,
    ladder_indices,
    pair_indicator_bound_mc,
    psi_kernel,
    psi_kernel_many,
    psi_majorant,
    recursion_check,
    second_moment_mc,
    transfer_matrix,
    witness_energy,
)
from ucover.growth.moments import level_factors
from ucover.parallel import trial_seeds

# ---------------------------------------------------------------------------
# Ladder
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("theta,j,expected", [(2.0, 10, 1024), (10.0, 3, 1000), (3.0, 0, 1)])
def test_ladder_examples(theta, j, expected):
    assert ladder(theta, j) == expected


def test_ladder_repairs_collisions():
    assert ladder_indices(1.5, 4) == [1, 2, 3, 4, 6]
    assert ladder_indices(1.01, 5) == [1, 2, 3, 4, 5, 6]


def test_ladder_errors():
    with pytest.raises(DomainError):
        ladder(1.0, 3)
    with pytest.raises(ContractViolation):
        ladder_indices(2.0, -1)
    with pytest.raises(ResourceLimitError):
        ladder(2.0, 70)
    with pytest.raises(ResourceLimitError):
        ladder(1e10, 3)


# ---------------------------------------------------------------------------
# Greedy cover
# ---------------------------------------------------------------------------


@pytest.fixture
def trace_stream(torus1):
    return SampleStream(31, torus1)


@pytest.fixture
def trace(trace_stream):
    return greedy_cover_trace(trace_stream, 0.1, 1, 2.0, 3, 12)


def test_trace_starts_from_first_block(trace):
    first = trace.levels[0]
    assert (first.i, first.N_i, first.Q_i) == (3, 8, 0)
    assert trace.i_max == 12
    assert trace.ladder == [2**j for j in range(14)]


def test_trace_counts_are_consistent(trace):
    for level, following in zip(trace.levels, trace.levels[1:]):
        assert following.N_i == level.N_i + level.T_next
        assert level.N_i == len(trace.i_sets[level.i])
        assert level.Q_i == len(trace.j_sets[level.i])
    for i, members in trace.i_sets.items():
        assert np.intersect1d(members, trace.j_sets[i]).size == 0
        assert members.max() <= trace.ladder[i]


def test_trace_new_members_come_from_current_block(trace):
    for i in range(trace.l + 1, trace.i_max + 1):
        fresh = trace.j_sets[i]
        assert np.all((fresh > trace.ladder[i - 1]) & (fresh <= trace.ladder[i]))


def test_trace_predictions(trace):
    lam = lambda_matrix(0.1, 1, 2.0).lam
    assert trace.predicted[0] == 8
    assert trace.predicted[2] == pytest.approx(8 * lam**2)
    rows = trace.csv_rows()
    assert len(rows[0]) == len(TRACE_COLUMNS)
    assert rows[-1][0] == 12
    assert rows[-1][5] == trace.levels[-1].N_i + trace.levels[-1].Q_i


def test_trace_json_omits_index_sets(trace):
    dumped = trace.model_dump(mode="json")
    assert "i_sets" not in dumped
    assert dumped["seed"] == 31


def test_trace_contract(trace_stream):
    with pytest.raises(ContractViolation):
        greedy_cover_trace(trace_stream, 0.1, 2, 2.0, 3, 5)
    with pytest.raises(DomainError):
        greedy_cover_trace(trace_stream, 0.1, 1, 2.0, 0, 5)
    with pytest.raises(DomainError):
        greedy_cover_trace(trace_stream, 0.1, 1, 2.0, 6, 5)


def test_cover_containment_on_circle(trace, trace_stream):
    report = containment_check(trace, trace_stream, 14)
    assert report.total_escapes == 0
    assert len(report.levels) == len(trace.levels)


def test_cover_containment_in_plane():
    stream = SampleStream(8, UniformTorus(d=2))
    trace = greedy_cover_trace(stream, 0.3, 2, 4.0, 1, 4)
    assert containment_check(trace, stream, 8).total_escapes == 0


@pytest.mark.parametrize("seed", trial_seeds(41, 20))
def test_tail_claim_at_smaller_radius(torus1, seed):
    stream = SampleStream(seed, torus1)
    trace = greedy_cover_trace(stream, 0.1, 1, 2.0, 3, 9)
    report = containment_check(trace, stream, 12, r=1e-3)
    assert all(level.tail_escapes == 0 for level in report.levels)
    assert all(level.r <= 1e-3 for level in report.levels)


@pytest.mark.slow
def test_fitted_rate_below_lambda(torus1):
    rates = [
        greedy_cover_trace(SampleStream(seed, torus1), 0.1, 1, 2.0, 3, 14).fitted_rate
        for seed in trial_seeds(2, 32)
    ]
    assert np.mean(rates) <= math.log(lambda_matrix(0.1, 1, 2.0).lam) + 0.1


def test_recursion_check(torus1):
    traces = [
        greedy_cover_trace(SampleStream(seed, torus1), 0.1, 1, 2.0, 3, 10)
        for seed in trial_seeds(3, 16)
    ]
    report = recursion_check(traces, 0.1, 1, 2.0)
    assert report.holds
    assert len(report.levels) == 7
    # With n_j = 2^j exactly the per-level coefficients are Theta and Delta.
    assert report.levels[0].coeff_t == pytest.approx(report.big_theta)
    assert report.levels[0].coeff_j == pytest.approx(report.delta)


def test_recursion_check_contract(torus1):
    with pytest.raises(ContractViolation):
        recursion_check([], 0.1, 1, 2.0)
    a = greedy_cover_trace(SampleStream(1, torus1), 0.1, 1, 2.0, 3, 6)
    b = greedy_cover_trace(SampleStream(2, torus1), 0.1, 1, 2.0, 3, 7)
    with pytest.raises(ContractViolation):
        recursion_check([a, b], 0.1, 1, 2.0)


def test_transfer_matrix_spectral_radius():
    matrix = transfer_matrix(0.3, 2, 3.0)
    entries = lambda_matrix(0.3, 2, 3.0)
    assert matrix[0, 0] == pytest.approx(1 + entries.big_theta)
    assert matrix[1, 1] == pytest.approx(entries.delta)
    assert max(abs(np.linalg.eigvals(matrix))) == pytest.approx(entries.lam, rel=1e-12)


# ---------------------------------------------------------------------------
# Psi kernel and K
# ---------------------------------------------------------------------------


def test_psi_is_one_outside_first_radius():
    # l_{n_4} = 1/16 for c = 1, theta = 2
    assert psi_kernel((0.2,), 2.0, 1.0, 1, 3, 8) == 1.0
    assert psi_kernel((0.07,), 2.0, 1.0, 1, 3, 8) == 1.0


def test_psi_at_origin_inverts_k():
    value = psi_kernel((0.0,), 2.0, 1.0, 1, 3, 8)
    assert value * k_mass(2.0, 1.0, 1, 3, 8) == pytest.approx(1.0, rel=1e-12)
    assert value > 1.0


def test_psi_telescopes():
    rng = np.random.default_rng(5)
    t = rng.uniform(-0.01, 0.01, size=(200, 1)) % 1.0
    whole = psi_kernel_many(t, 2.0, 1.0, 1, 3, 9)
    for j in (3, 5, 8):
        left = psi_kernel_many(t, 2.0, 1.0, 1, 3, j)
        right = psi_kernel_many(t, 2.0, 1.0, 1, j + 1, 9)
        assert np.allclose(whole, left * right, rtol=1e-12, atol=0)


def first_radius(c, d, theta, l):
    """l_{n_{l+1}} on an integer ladder."""
    return c * (theta ** (l + 1)) ** (-1.0 / d)


@pytest.mark.parametrize(
    "c,d,theta,l,q",
    [
        (1.0, 1, 2.0, 3, 8),
        (0.8, 1, 3.0, 2, 6),
        (1.5, 1, 2.0, 2, 9),
        (0.6, 1, 4.0, 1, 5),
        (1.0, 2, 4.0, 2, 5),
    ],
)
def test_psi_below_majorant(c, d, theta, l, q):
    rng = np.random.default_rng(int(theta * 100 + l))
    scale = 4 * first_radius(c, d, theta, l)
    t = (rng.uniform(-scale, scale, size=(10_000, d))) % 1.0
    psi = psi_kernel_many(t, theta, c, d, l, q)
    assert np.all(psi >= 1.0)
    majorant = np.array([psi_majorant(row, theta, c, d, l) for row in t])
    assert np.all(psi <= majorant)


def test_psi_majorant_values():
    assert psi_majorant((0.0,), 2.0, 1.0, 1, 3) == math.inf
    assert psi_majorant((0.25,), 2.0, 1.0, 1, 3) == pytest.approx(
        1 + c_constant(1.0, 1, 2.0, 3) * 0.25 ** (-s_exponent(1.0, 1, 2.0)), rel=1e-12
    )


def test_psi_contract():
    with pytest.raises(ContractViolation):
        psi_kernel_many(np.zeros((3, 2)), 2.0, 1.0, 1, 3, 5)
    with pytest.raises(DomainError):
        psi_kernel((0.1,), 2.0, 1.0, 1, 5, 3)


def test_psi_never_hit_level():
    # (2c)^2 underflows, so no level can ever be hit.
    with pytest.raises(NumericError):
        psi_kernel((0.0, 0.0), 2.0, 1e-200, 2, 1, 3)


def test_k_mass_single_level():
    radii, misses, hits = level_factors(2.0, 1.0, 1, 3, 3)
    # n_2 = 4, n_3 = 8, l_{n_4} = 1/16
    assert radii[0] == pytest.approx(1 / 16)
    assert k_mass(2.0, 1.0, 1, 3, 3) == pytest.approx(1 - (1 - 1 / 8) ** 4, rel=1e-12)
    assert misses[0] + hits[0] == pytest.approx(1.0)


def test_k_mass_saturates():
    assert k_mass(2.0, 10.0, 1, 1, 2) == 1.0


def test_k_mass_decreases_in_q():
    values = [k_mass(2.0, 1.0, 1, 3, q) for q in range(3, 10)]
    assert all(0 < b < a <= 1 for a, b in zip(values, values[1:]))


def test_level_factors_domain():
    with pytest.raises(DomainError):
        level_factors(2.0, 1.0, 1, 0, 3)


# ---------------------------------------------------------------------------
# Pair indicator
# ---------------------------------------------------------------------------


def test_pair_indicator_same_point():
    result = pair_indicator_bound_mc((0.3,), (0.3,), 0.1, 10_000, seed=2)
    assert result.exact == pytest.approx(0.2)
    assert result.bound == pytest.approx(0.2)
    sigma = math.sqrt(0.2 * 0.8 / 10_000)
    assert abs(result.estimate - 0.2) <= 3 * sigma


def test_pair_indicator_overlap():
    result = pair_indicator_bound_mc((0.0,), (0.1,), 0.1, 10_000, seed=3)
    assert result.exact == pytest.approx(0.1)
    assert result.bound == pytest.approx(0.2)
    sigma = math.sqrt(0.1 * 0.9 / 10_000)
    assert abs(result.estimate - 0.1) <= 4 * sigma
    assert result.within_bound


def test_pair_indicator_far_apart():
    result = pair_indicator_bound_mc((0.0, 0.0), (0.5, 0.1), 0.1, 2000)
    assert result.estimate == 0.0
    assert result.bound == 0.0
    assert result.exact == 0.0
    assert result.complement_bound == pytest.approx(1 - 2 * 0.04)


def test_pair_indicator_random_configs():
    rng = np.random.default_rng(8)
    for case in range(100):
        d = 1 + case % 2
        x, y = rng.random(d), rng.random(d)
        ell = float(rng.uniform(0.01, 0.3))
        result = pair_indicator_bound_mc(x, y, ell, 10_000, seed=case)
        assert result.exact <= result.bound + 1e-12
        assert result.within_bound
        assert 0.0 <= result.complement_estimate <= 1.0


def test_pair_indicator_contract():
    with pytest.raises(ContractViolation):
        pair_indicator_bound_mc((0.0,), (0.1,), 0.1, 999)
    with pytest.raises(DomainError):
        pair_indicator_bound_mc((0.0,), (0.1,), 0.0, 1000)
    with pytest.raises(ContractViolation):
        pair_indicator_bound_mc((0.0,), (0.1, 0.2), 0.1, 1000)


# ---------------------------------------------------------------------------
# Energy and second moments
# ---------------------------------------------------------------------------


def test_witness_energy_small_grids():
    assert witness_energy(GridCover.empty(1, 4), 0.5) == 0.0
    grid = GridCover.empty(1, 4)
    grid.cells[0] = True
    assert witness_energy(grid, 0.5) == 0.0
    grid.cells[8] = True
    assert witness_energy(grid, 1.0) == pytest.approx(2 * 2.0 / 256)
    assert witness_energy(GridCover.full(1, 3), 0.0) == pytest.approx(56 / 64)


def test_witness_energy_of_full_grid():
    from ucover.bounds import energy_constant

    assert witness_energy(GridCover.full(1, 10), 0.5) == pytest.approx(
        energy_constant(0.5, 1), rel=0.05
    )


def test_witness_energy_domain():
    with pytest.raises(DomainError):
        witness_energy(GridCover.full(1, 3), -1.0)


def test_second_moment_requires_hypothesis():
    with pytest.raises(PreconditionError):
        second_moment_mc(1.0, 1, 2.0, 4, 9, 10, 4, 0.1)


def test_second_moment_saturated_window():
    report = second_moment_mc(10.0, 1, 2.0, 1, 2, 6, 5, 0.1)
    assert report.hypothesis_holds
    assert report.masses == [1.0] * 5
    assert report.mass_var == 0.0
    assert report.k_mass == 1.0
    assert report.mass_rel_error == 0.0
    assert report.mass_matches_k
    assert report.second_moment_ok
    assert report.energy_ok
    assert report.band_fraction == 1.0


def test_second_moment_without_hypothesis():
    report = second_moment_mc(1.0, 1, 2.0, 3, 6, 10, 8, 0.1, strict=False)
    assert not report.hypothesis_holds
    assert report.energy_mean is None
    assert report.second_moment_bound is None
    assert len(report.masses) == 8
    assert report.k_mass == pytest.approx(k_mass(2.0, 1.0, 1, 3, 6))
    assert report.mass_rel_error == pytest.approx(
        abs(report.mass_mean - report.k_mass) / report.k_mass
    )


def test_second_moment_thread_independent():
    a = second_moment_mc(1.0, 1, 2.0, 3, 6, 10, 6, 0.1, strict=False, threads=1)
    b = second_moment_mc(1.0, 1, 2.0, 3, 6, 10, 6, 0.1, strict=False, threads=4)
    assert a.masses == b.masses


def test_second_moment_contract():
    with pytest.raises(ContractViolation):
        second_moment_mc(10.0, 1, 2.0, 1, 2, 6, 0, 0.1)


@pytest.mark.slow
def test_second_moment_mass_mean():
    report = second_moment_mc(1.0, 1, 2.0, 4, 9, 12, 200, 0.1, strict=False)
    assert report.mass_matches_k
    assert report.mass_rel_error == pytest.approx(
        abs(report.mass_mean - report.k_mass) / report.k_mass
    )
    assert 0.0 < report.band_fraction <= 1.0
