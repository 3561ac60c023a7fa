"""Error hierarchy for ucover."""

from typing import Optional


class UcoverError(Exception):
    """Base class for all ucover errors."""


class ContractViolation(UcoverError, ValueError):
    """An argument breaks an operation's contract (dimension mismatch, negative radius)."""


class DomainError(UcoverError, ValueError):
    """A parameter lies outside the domain of a formula (for example theta <= 1)."""


class ScheduleIndexError(UcoverError, IndexError):
    """An explicit radius schedule was indexed past its end."""


class ResourceLimitError(UcoverError):
    """A request would exceed a memory or index guard."""


class NumericError(UcoverError, ArithmeticError):
    """A numerical evaluation produced a non-finite or degenerate value."""

    def __init__(self, message: str, theta: Optional[float] = None):
        """Initialize numeric error.

        Args:
            message: Error description
            theta: Offending theta value, when the failure comes from a theta scan
        """
        super().__init__(message)
        self.theta = theta


class UnsupportedConfiguration(UcoverError):
    """The requested combination of schedule and measure is not handled."""


class PreconditionError(UcoverError):
    """A lemma hypothesis required by an experiment does not hold."""


class UndefinedDimensionError(UcoverError):
    """Box-counting dimension requested for an empty grid."""


def exit_code_for(error: BaseException) -> int:
    """Map an error to the CLI exit code.

    Args:
        error: Raised exception

    Returns:
        2 for resource errors, 1 for other ucover errors
    """
    if isinstance(error, ResourceLimitError):
        return 2
    return 1
