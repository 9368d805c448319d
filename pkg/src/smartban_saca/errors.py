"""Exception types raised by the analytic and simulation engines."""


class SacaError(Exception):
    """Base class for all package errors."""


class InvalidProbability(SacaError, ValueError):
    pass


class StageOutOfRange(SacaError, ValueError):
    pass


class SingularityError(SacaError, ZeroDivisionError):
    """A closed form was evaluated at a point where it divides by zero."""


class DelayDomainError(SacaError, ValueError):
    """Mean delay is undefined because the node never succeeds (or never sends)."""


class ConvergenceError(SacaError, RuntimeError):
    pass


class MissingCounterpartError(SacaError, ValueError):
    """A grid point lacks either its analytic or its simulation record."""
