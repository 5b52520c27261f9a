"""Generalized coherent-state Bargmann analysis.

Families of coherent states defined by a weight sequence rho(n), their
entire-function representations, growth (order/type) estimation, point
sequence densities, and overcompleteness / undercompleteness verdicts with
constructive orthogonal witnesses.
"""

from . import bargmann, completeness, family, growth, numerics, sequences, specfun
from .errors import (
    ConvergenceError,
    DomainError,
    IndeterminateError,
    PreconditionError,
    SequenceExhaustedError,
    TruncationError,
    UnsupportedWeightError,
)

__version__ = "0.1.0"

__all__ = [
    "bargmann",
    "completeness",
    "family",
    "growth",
    "numerics",
    "sequences",
    "specfun",
    "ConvergenceError",
    "DomainError",
    "IndeterminateError",
    "PreconditionError",
    "SequenceExhaustedError",
    "TruncationError",
    "UnsupportedWeightError",
    "__version__",
]
