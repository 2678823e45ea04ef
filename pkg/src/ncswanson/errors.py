"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Raised when parameters leave the region where a computation is valid.

    Examples include a deformation angle outside (-pi/4, pi/4), a grid whose
    boundary values are too large for zero padding, or a coherent label on or
    beyond the convergence radius of its sequence.
    """


class TruncationError(RuntimeError):
    """Raised when a truncated expansion cannot meet a requested tolerance.

    Parameters
    ----------
    message : str
        Human-readable description.
    achievable : float
        The tail bound actually attainable at the given cutoff, so callers
        can retry with a larger cutoff or a looser tolerance.
    """

    def __init__(self, message, achievable):
        super().__init__(message)
        self.achievable = achievable


class UnsupportedSequenceError(ValueError):
    """Raised when a coefficient sequence admits no usable moment measure."""


class TruncationWarning(UserWarning):
    """Warns that a truncated result is likely contaminated by edge effects."""
