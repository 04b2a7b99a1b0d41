"""Exception types shared by all modules."""


class SeqmpsError(Exception):
    """Base class for package errors."""


class InvalidInputError(SeqmpsError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(SeqmpsError):
    """A request exceeds a documented size cap (dense conversions)."""


class NumericalFailureError(SeqmpsError):
    """An underlying numerical kernel failed to converge."""


class DegenerateStateError(SeqmpsError):
    """An operation requires a nonzero state but received (numerically) zero."""
