"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a structural invariant (bad layout,
    non-orthonormal basis, malformed file, out-of-range parameter)."""


class NumericalError(RuntimeError):
    """Raised when a computation degenerates (e.g. a protocol whose
    overlap with the target vanishes)."""
