"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A series or iteration failed to converge within its cap."""


class UnsupportedWeightError(ValueError):
    """The family has no known radial weight function."""


class SequenceExhaustedError(ValueError):
    """A point sequence is too short for the requested radius."""


class IndeterminateError(RuntimeError):
    """A verdict or estimate sits within tolerance of a decision threshold."""


class PreconditionError(ValueError):
    """A documented operation precondition is violated."""


class TruncationError(RuntimeError):
    """A truncation is too small for the requested accuracy."""
