"""Exception hierarchy shared across the package.

Each class carries the process exit code the CLI maps it to, so error
categories stay in one place.
"""


class InflakitError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(InflakitError, ValueError):
    """Invalid argument or precondition violation."""

    exit_code = 2


class OrderingError(InputError):
    """Time or date arguments supplied out of order."""


class InsufficientDataError(InputError):
    """A required observation (e.g. a CPI month) is missing."""


class SpecificationError(InputError):
    """An operation was asked for without the inputs it requires."""


class InsufficientPathsError(InputError):
    """Fewer paths than a statistic needs."""


class ParseError(InflakitError, ValueError):
    """Malformed input file; message carries file and line location."""

    exit_code = 2


class CalibrationError(InflakitError):
    """A solver failed to reach its target; carries the best residual."""

    exit_code = 3

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DomainError(InflakitError, ValueError):
    """Numerical-domain violation (negative variance, log of <= 0, ...)."""

    exit_code = 4


class ArbitrageViolationError(DomainError):
    """Model inputs admit arbitrage (e.g. risk-neutral probability outside [0,1])."""


class CapacityError(InflakitError):
    """A request exceeds configured resource limits."""

    exit_code = 5


class StateError(InflakitError):
    """Operation requires prior setup (e.g. a fitted drift function)."""
