"""Shared exception types."""


class ValidationError(ValueError):
    """Input violates a documented invariant (wrong shape, bad spectrum, ...)."""


class DimensionMismatchError(ValidationError):
    """Operands have incompatible dimensions."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach its threshold; carries the residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
