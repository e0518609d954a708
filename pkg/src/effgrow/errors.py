"""Exception hierarchy shared across the package."""


class EffgrowError(Exception):
    """Base class for all package errors."""


class DomainError(EffgrowError, ValueError):
    """A parameter violates its mathematical domain."""


class SchemaError(EffgrowError, ValueError):
    """Malformed config, CSV, or serialized value."""


class InconsistencyError(EffgrowError, RuntimeError):
    """An internal identity failed; signals a bug, not bad input."""


class ConvergenceError(EffgrowError, RuntimeError):
    """An iterative solver hit its cap before reaching tolerance."""

    def __init__(self, message: str, residual: float | None = None,
                 residual_history: list[float] | None = None):
        super().__init__(message)
        self.residual = residual
        self.residual_history = residual_history or []
