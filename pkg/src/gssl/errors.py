"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ParameterError -> 1,
DataError -> 2, NumericError -> 3.
"""


class GsslError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GsslError):
    """Invalid argument or configuration value."""


class DataError(GsslError):
    """Invalid input data: malformed files, non-finite features, bad schemas."""


class NumericError(GsslError):
    """Numerical failure: NaN iterates, non-converged eigensolves."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals
