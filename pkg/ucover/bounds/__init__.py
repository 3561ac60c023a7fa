"""Closed-form constants and dimension bounds for the critical family."""

from ucover.bounds.formulas import (
    TransferEntries,
    c_constant,
    coverage_rate,
    critical_c,
    energy_constant,
    lambda_matrix,
    s_exponent,
    transfer_matrix,
)
from ucover.bounds.optimize import ThetaOptimum, golden_section, optimize_theta, theta_grid
from ucover.bounds.report import (
    LIMIT_AT_INFINITY,
    BoundReport,
    Regime,
    bound_report,
    lower_bound_dim,
    upper_bound_dim,
)

__all__ = [
    "TransferEntries",
    "c_constant",
    "coverage_rate",
    "critical_c",
    "energy_constant",
    "lambda_matrix",
    "s_exponent",
    "transfer_matrix",
    "ThetaOptimum",
    "golden_section",
    "optimize_theta",
    "theta_grid",
    "LIMIT_AT_INFINITY",
    "BoundReport",
    "Regime",
    "bound_report",
    "lower_bound_dim",
    "upper_bound_dim",
]
