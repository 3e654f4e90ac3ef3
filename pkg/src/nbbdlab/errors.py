"""Shared exception types for the numerical laboratory."""


class NbbdError(Exception):
    """Base class for all package-specific errors."""


class PoleError(NbbdError):
    """Evaluation requested at or too close to a pole of the function."""


class PrecisionError(NbbdError):
    """A stated accuracy target cannot be met within the configured budget."""


class CollisionError(NbbdError):
    """An evaluation point is too close to a zero for the residue expansion."""


class QuadratureError(NbbdError):
    """Adaptive quadrature failed to converge within the panel budget."""


class RefinementError(NbbdError):
    """Local zero refinement found no sign change in the search window."""


class ZeroTableParseError(NbbdError):
    """A zero-ordinate file violates the one-ascending-decimal-per-line format."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class CapacityError(NbbdError):
    """An argument exceeds a documented size limit."""
