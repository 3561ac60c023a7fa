"""Dichotomy classification, series diagnostics and empirical checks."""

from ucover.criteria.dichotomy import (
    DichotomyVerdict,
    SeriesBehavior,
    Verdict,
    classify_dichotomy,
    dimension_sandwich,
)
from ucover.criteria.empirical import empirical_covered_fraction
from ucover.criteria.series import (
    SERIES_COLUMNS,
    SeriesDiagnostics,
    series_csv_rows,
    series_partial_diagnostics,
    series_terms,
)

__all__ = [
    "DichotomyVerdict",
    "SeriesBehavior",
    "Verdict",
    "classify_dichotomy",
    "dimension_sandwich",
    "empirical_covered_fraction",
    "SERIES_COLUMNS",
    "SeriesDiagnostics",
    "series_csv_rows",
    "series_partial_diagnostics",
    "series_terms",
]
