"""Exception hierarchy shared across the package."""


class CoxMicError(Exception):
    """Base class for all package errors."""


class ConfigError(CoxMicError):
    """Invalid or inconsistent user configuration (bad column name, flag combo)."""


class DataError(CoxMicError):
    """Ingestion produced no usable data (e.g. zero rows after deletion)."""


class ValidationError(CoxMicError):
    """Data or argument values violate a documented precondition."""


class DegenerateColumnError(CoxMicError):
    """A covariate column is constant and cannot be standardized."""


class DomainError(CoxMicError):
    """A numeric argument is outside the function's domain (non-finite, wrong length)."""


class RankDeficiencyError(CoxMicError):
    """The information matrix is singular along the solve path."""


class ConvergenceError(CoxMicError):
    """An iterative solver exhausted its budget.

    Carries the last iterate so callers can inspect or restart.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class CalibrationError(CoxMicError):
    """Censoring calibration could not reach the requested target."""
