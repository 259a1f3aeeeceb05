"""Exception hierarchy shared by the formulators, solvers and the CLI."""
from typing import Optional


class QuboTrainerError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigurationError(QuboTrainerError):
    """Invalid run configuration, precision vector or annealing schedule."""

    exit_code = 2


class IngestionError(QuboTrainerError):
    """Unreadable or ill-formed input data."""

    exit_code = 3

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class SolverRefusalError(QuboTrainerError):
    """A solver or oracle declined an instance above its size cap."""

    exit_code = 4


class VerificationFailure(QuboTrainerError):
    """The decoded solution did not meet the oracle acceptance threshold."""

    exit_code = 5


class DimensionMismatchError(QuboTrainerError, ValueError):
    """Array shapes disagree; always a caller bug."""
