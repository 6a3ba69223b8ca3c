"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class SolverAccuracyError(RuntimeError):
    """Raised when an optimizer certificate disagrees with a direct recomputation."""
