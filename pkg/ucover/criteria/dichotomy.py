"""Analytic measure dichotomy for power-law schedules under homogeneous measures."""

import logging
import math
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ucover.core import CriticalScale, Explicit, MeasureBase, PowerLaw, ScheduleBase
from ucover.errors import DomainError, UnsupportedConfiguration

logger = logging.getLogger(__name__)

PRINTED_VARIANT_NOTE = (
    "second series uses the ball-mass weight sum m_n exp(-n m_n); the variant "
    "sum l_n exp(-n (2 l_n)^d) is recorded but not used"
)


class Verdict(str, Enum):
    """Almost-sure size of U(omega, l) under the sampling measure."""

    FULL_MEASURE = "FullMeasure"
    ZERO_MEASURE = "ZeroMeasure"
    COUNTABLE_AS = "CountableAS"
    UNKNOWN = "Unknown"


class SeriesBehavior(str, Enum):
    """Convergence of one series."""

    DIVERGES = "Diverges"
    CONVERGES = "Converges"
    UNDECIDED = "Undecided"


class DichotomyVerdict(BaseModel):
    """Classification of a (schedule, measure) pair."""

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    first_series: SeriesBehavior = Field(..., description="sum m_n")
    second_series: SeriesBehavior = Field(..., description="sum m_n exp(-n m_n)")
    countability_series: SeriesBehavior = Field(
        ..., description="sum n m(l_n + l_{n+1})"
    )
    monotonicity_hypothesis_holds: bool = Field(
        ..., description="n m_n is nondecreasing in n"
    )
    notes: str = Field(default="", description="Free-text remarks")


def _behaviour(converges: bool) -> SeriesBehavior:
    return SeriesBehavior.CONVERGES if converges else SeriesBehavior.DIVERGES


def _explicit_verdict(schedule: Explicit, measure: MeasureBase) -> DichotomyVerdict:
    n = np.arange(1, schedule.length + 1, dtype=np.float64)
    r = schedule.radii(n.astype(np.int64))
    masses = np.where(r >= 0.5, 1.0, np.minimum(1.0, (2.0 * r) ** measure.support_dim))
    monotone = bool(np.all(np.diff(n * masses) >= 0.0))
    return DichotomyVerdict(
        verdict=Verdict.UNKNOWN,
        first_series=SeriesBehavior.UNDECIDED,
        second_series=SeriesBehavior.UNDECIDED,
        countability_series=SeriesBehavior.UNDECIDED,
        monotonicity_hypothesis_holds=monotone,
        notes=(
            f"explicit schedule of length {schedule.length}: convergence is not decidable "
            "from finitely many terms; see series diagnostics"
        ),
    )


def classify_dichotomy(schedule: ScheduleBase, measure: MeasureBase) -> DichotomyVerdict:
    """Decide the measure of U(omega, l) for l_n = c n^-alpha from the exponent alpha*k.

    With k the support dimension and m_n = min(1, (2c)^k n^(-alpha k)):
    alpha*k < 1 gives full measure; 1 <= alpha*k <= 2 gives measure zero
    (the second series diverges at alpha*k = 1, the first converges above it);
    alpha*k > 2 makes the countability series converge, so U is almost surely
    the sample set itself.

    Args:
        schedule: PowerLaw, CriticalScale or Explicit schedule
        measure: Homogeneous sampling measure

    Returns:
        DichotomyVerdict

    Raises:
        UnsupportedConfiguration: If the measure is not homogeneous
    """
    if not measure.homogeneous:
        raise UnsupportedConfiguration("classification needs a homogeneous measure")
    if isinstance(schedule, Explicit):
        return _explicit_verdict(schedule, measure)
    if not isinstance(schedule, (PowerLaw, CriticalScale)):
        raise UnsupportedConfiguration(f"no classifier for schedule {type(schedule).__name__}")

    k = measure.support_dim
    ak = schedule.alpha * k
    critical = math.isclose(ak, 1.0, rel_tol=1e-12)
    notes = [f"alpha*k = {ak:.6g} (k = {k})", PRINTED_VARIANT_NOTE]

    if ak < 1.0 and not critical:
        verdict = Verdict.FULL_MEASURE
        first, second, countable = False, True, False
    elif critical:
        verdict = Verdict.ZERO_MEASURE
        first, second, countable = False, False, False
        notes.append("terms of the second series decay like 1/n, so E(l) is empty")
    elif ak <= 2.0 or math.isclose(ak, 2.0, rel_tol=1e-12):
        verdict = Verdict.ZERO_MEASURE
        first, second, countable = True, True, False
        notes.append("first series converges; countability is not concluded in this band")
    else:
        verdict = Verdict.COUNTABLE_AS
        first, second, countable = True, True, True

    monotone = ak <= 1.0 or critical
    if not monotone and first:
        notes.append("n m_n is eventually decreasing; zero measure follows from Borel-Cantelli")

    result = DichotomyVerdict(
        verdict=verdict,
        first_series=_behaviour(first),
        second_series=_behaviour(second),
        countability_series=_behaviour(countable),
        monotonicity_hypothesis_holds=monotone,
        notes="; ".join(notes),
    )
    logger.debug(f"Classified alpha*k={ak:.6g} as {verdict.value}")
    return result


def dimension_sandwich(alpha: float, measure: MeasureBase) -> Tuple[float, float]:
    """Interval for dim_H U(omega, (n^-alpha)) implied by the local dimension of the measure.

    For a homogeneous measure of support dimension k the local dimension is
    k everywhere on the support, so U is sandwiched between sets of
    dimension 0 or k depending on the sign of 1/alpha - k.

    Returns:
        (lower, upper)

    Raises:
        DomainError: If alpha <= 0
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not measure.homogeneous:
        raise UnsupportedConfiguration("dimension sandwich needs a homogeneous measure")
    k = float(measure.support_dim)
    inverse = 1.0 / alpha
    if math.isclose(inverse, k, rel_tol=1e-12):
        return 0.0, k
    if inverse < k:
        return 0.0, 0.0
    return k, k
