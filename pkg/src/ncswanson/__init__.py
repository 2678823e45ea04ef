"""Numerical toolkit for the two-dimensional noncommutative Swanson model.

The package constructs the model's pseudo-bosonic ladder algebra, its
biorthogonal eigenfamilies and their closed-form norms, bicoherent states,
and the associated resolution-of-identity checks, all at desk scale.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    TruncationError,
    TruncationWarning,
    UnsupportedSequenceError,
)

__all__ = [
    "__version__",
    "DomainError",
    "TruncationError",
    "TruncationWarning",
    "UnsupportedSequenceError",
]
