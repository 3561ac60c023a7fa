"""Tests for the dichotomy classifier, the series diagnostics and the covered fraction."""

import math

import numpy as np
import pytest

from ucover.core import CriticalScale, Explicit, PowerLaw, SampleStream, UniformSubtorus, UniformTorus
from ucover.criteria import (
    SERIES_COLUMNS,
    SeriesBehavior,
    Verdict,
    classify_dichotomy,
    dimension_sandwich,
    empirical_covered_fraction,
    series_csv_rows,
    series_partial_diagnostics,
    series_terms,
)
from ucover.errors import ContractViolation, DomainError, UnsupportedConfiguration


class LumpyTorus(UniformTorus):
    """Stand-in for a measure whose ball mass varies over the torus."""

    @property
    def homogeneous(self) -> bool:
        return False


def harmonic(n):
    return float(np.sum(1.0 / np.arange(1, n + 1)))


# ---------------------------------------------------------------------------
# classify_dichotomy
# ---------------------------------------------------------------------------


def test_classify_full_measure():
    result = classify_dichotomy(PowerLaw(c=1, alpha=0.5), UniformTorus(d=1))
    assert result.verdict is Verdict.FULL_MEASURE
    assert result.first_series is SeriesBehavior.DIVERGES
    assert result.second_series is SeriesBehavior.CONVERGES
    assert result.monotonicity_hypothesis_holds


def test_classify_countable():
    result = classify_dichotomy(PowerLaw(c=1, alpha=3), UniformTorus(d=1))
    assert result.verdict is Verdict.COUNTABLE_AS
    assert result.countability_series is SeriesBehavior.CONVERGES
    assert not result.monotonicity_hypothesis_holds


def test_classify_critical_exponent():
    result = classify_dichotomy(CriticalScale(c=1, d=1), UniformTorus(d=1))
    assert result.verdict is Verdict.ZERO_MEASURE
    assert result.first_series is SeriesBehavior.DIVERGES
    assert result.second_series is SeriesBehavior.DIVERGES
    assert result.monotonicity_hypothesis_holds


@pytest.mark.parametrize("alpha", [1.5, 2.0])
def test_classify_zero_measure_band(alpha):
    result = classify_dichotomy(PowerLaw(c=1, alpha=alpha), UniformTorus(d=1))
    assert result.verdict is Verdict.ZERO_MEASURE
    assert result.first_series is SeriesBehavior.CONVERGES
    assert result.countability_series is SeriesBehavior.DIVERGES
    assert not result.monotonicity_hypothesis_holds


def test_classify_uses_support_dimension():
    schedule = PowerLaw(c=1, alpha=0.75)
    on_line = classify_dichotomy(schedule, UniformSubtorus(d=2, d_support=1))
    on_plane = classify_dichotomy(schedule, UniformTorus(d=2))
    assert on_line.verdict is Verdict.FULL_MEASURE
    assert on_plane.verdict is Verdict.ZERO_MEASURE


def test_classify_critical_scale_in_higher_dimension():
    assert classify_dichotomy(CriticalScale(c=0.1, d=3), UniformTorus(d=3)).verdict is (
        Verdict.ZERO_MEASURE
    )


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("c", [0.1, 0.5, 1.0, 2.0])
def test_classify_ignores_scale(alpha, c):
    measure = UniformTorus(d=1)
    a = classify_dichotomy(PowerLaw(c=c, alpha=alpha), measure)
    b = classify_dichotomy(PowerLaw(c=2 * c, alpha=alpha), measure)
    assert a.verdict is b.verdict
    assert a.monotonicity_hypothesis_holds == (alpha <= 1.0)


def test_classify_explicit_is_unknown():
    result = classify_dichotomy(Explicit(values=(0.5, 0.25, 0.125)), UniformTorus(d=1))
    assert result.verdict is Verdict.UNKNOWN
    assert result.first_series is SeriesBehavior.UNDECIDED
    assert "explicit" in result.notes
    # n m_n = 1, 1, 0.75
    assert not result.monotonicity_hypothesis_holds


def test_classify_notes_and_json():
    result = classify_dichotomy(PowerLaw(c=1, alpha=0.5), UniformTorus(d=1))
    assert "alpha*k = 0.5" in result.notes
    dumped = result.model_dump(mode="json")
    assert dumped["verdict"] == "FullMeasure"
    assert dumped["second_series"] == "Converges"


def test_classify_rejects_inhomogeneous_measure():
    with pytest.raises(UnsupportedConfiguration):
        classify_dichotomy(PowerLaw(c=1, alpha=1), LumpyTorus(d=1))


@pytest.mark.parametrize(
    "alpha,measure,expected",
    [
        (2.0, UniformTorus(d=1), (0.0, 0.0)),
        (0.5, UniformTorus(d=1), (1.0, 1.0)),
        (1.0, UniformTorus(d=1), (0.0, 1.0)),
        (0.5, UniformSubtorus(d=2, d_support=1), (1.0, 1.0)),
        (0.5, UniformTorus(d=2), (0.0, 2.0)),
    ],
)
def test_dimension_sandwich(alpha, measure, expected):
    assert dimension_sandwich(alpha, measure) == expected


def test_dimension_sandwich_domain():
    with pytest.raises(DomainError):
        dimension_sandwich(0.0, UniformTorus(d=1))
    with pytest.raises(UnsupportedConfiguration):
        dimension_sandwich(1.0, LumpyTorus(d=1))


# ---------------------------------------------------------------------------
# Series diagnostics
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("N", [10, 1000, 100_000])
def test_critical_series_partial_sums(N):
    diag = series_partial_diagnostics(CriticalScale(c=0.5, d=1), UniformTorus(d=1), N)
    assert diag.n == N
    assert diag.partial_first == pytest.approx(harmonic(N), rel=1e-9)
    assert diag.partial_second == pytest.approx(harmonic(N) / math.e, rel=1e-9)


def test_explicit_series_exact_sums():
    diag = series_partial_diagnostics(Explicit(values=(0.5, 0.25, 0.125)), UniformTorus(d=1), 3)
    assert diag.n == 3
    assert diag.partial_first == pytest.approx(1.75)
    assert diag.partial_second == pytest.approx(1.5 / math.e + 0.25 * math.exp(-0.75))
    assert diag.partial_countability == pytest.approx(4.0)
    assert diag.exponent_first is None


def test_explicit_series_is_capped_at_length():
    terms = series_terms(Explicit(values=(0.5, 0.25, 0.125)), UniformTorus(d=1), 50)
    assert terms.shape == (3, 3)


def test_countability_series_converges_above_two():
    schedule, measure = PowerLaw(c=1, alpha=3), UniformTorus(d=1)
    short = series_partial_diagnostics(schedule, measure, 10_000).partial_countability
    long = series_partial_diagnostics(schedule, measure, 100_000).partial_countability
    assert short == pytest.approx(long, rel=0.01)


def test_tail_exponents():
    diag = series_partial_diagnostics(PowerLaw(c=0.1, alpha=1.5), UniformTorus(d=1), 10_000)
    assert diag.exponent_first == pytest.approx(-1.5, abs=1e-6)
    assert diag.exponent_countability == pytest.approx(-0.5, abs=0.01)


def test_series_needs_enough_terms():
    with pytest.raises(ContractViolation):
        series_terms(PowerLaw(c=1, alpha=1), UniformTorus(d=1), 9)
    with pytest.raises(ContractViolation):
        series_terms(Explicit(values=(0.5,)), UniformTorus(d=1), 0)


def test_series_csv_rows():
    terms = series_terms(CriticalScale(c=0.5, d=1), UniformTorus(d=1), 25)
    rows = list(series_csv_rows(terms, stride=10))
    assert [row[0] for row in rows] == [10, 20, 25]
    assert all(len(row) == len(SERIES_COLUMNS) for row in rows)
    assert rows[-1][4] == pytest.approx(harmonic(25))
    assert [row[0] for row in series_csv_rows(terms)] == list(range(1, 26))


# ---------------------------------------------------------------------------
# Empirical covered fraction
# ---------------------------------------------------------------------------


def test_covered_fraction_full_for_large_radii(stream1):
    assert empirical_covered_fraction(stream1, PowerLaw(c=1, alpha=0.01), 2, 16, 8) == 1.0


@pytest.mark.parametrize(
    "alpha,low,high", [(0.5, 0.99, 1.0), (1.0, 0.01, 0.99), (2.0, 0.0, 0.01), (3.0, 0.0, 0.01)]
)
def test_covered_fraction_follows_verdict(torus1, alpha, low, high):
    stream = SampleStream(21, torus1)
    fraction = empirical_covered_fraction(stream, PowerLaw(c=1, alpha=alpha), 256, 2**17, 14)
    assert low <= fraction <= high
