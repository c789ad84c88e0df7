"""
Exception classes for hyperbolic step computations.

This module defines the exception hierarchy raised by the numerical library:
geometry errors, expression parse and evaluation errors, invalid measures,
quadrature failures, and classification preconditions.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .dynamics import OrbitTrace


class HStepError(Exception):
    """Base class for hyperbolic step errors."""


class OutsideHalfPlaneError(HStepError):
    """Raised when a point is not strictly inside the upper half-plane."""

    def __init__(self, x: float, y: float) -> None:
        """Initialize the exception with the offending coordinates."""
        super().__init__(f"Point ({x!r}, {y!r}) is not in the upper half-plane")


class ExprSyntaxError(HStepError):
    """Raised when an expression string is malformed."""

    def __init__(self, reason: str, offset: int) -> None:
        """Initialize the exception with the byte offset of the problem."""
        super().__init__(f"{reason} at offset {offset}")
        self.reason = reason
        self.offset = offset


class ExprEvalError(HStepError):
    """Raised when an expression cannot be evaluated to a finite real."""

    def __init__(self, reason: str) -> None:
        """Initialize the exception."""
        super().__init__(f"Expression evaluation failed: {reason}")
        self.reason = reason


class InvalidMeasureError(HStepError):
    """Raised when a measure component violates its invariants."""

    def __init__(self, reason: str) -> None:
        """Initialize the exception."""
        super().__init__(f"Invalid measure: {reason}")
        self.reason = reason


class QuadratureFailureError(HStepError):
    """Raised when an integral cannot meet its error target within budget."""

    def __init__(
        self,
        reason: str,
        estimate: complex = 0.0,
        error: float = float("inf"),
        evaluations: int = 0,
    ) -> None:
        """Initialize the exception with the best estimate reached."""
        super().__init__(
            f"Quadrature failed: {reason} "
            f"(estimate {estimate}, error {error:.3g}, {evaluations} evaluations)"
        )
        self.reason = reason
        self.estimate = estimate
        self.error = error
        self.evaluations = evaluations


class NotL1Error(HStepError):
    """Raised when the first absolute moment of the measure diverges."""

    def __init__(self) -> None:
        """Initialize the exception."""
        super().__init__("First absolute moment of the measure is infinite")


class NotHalfLineError(HStepError):
    """Raised when the measure support is not bounded above."""

    def __init__(self) -> None:
        """Initialize the exception."""
        super().__init__("Measure support is not bounded above")


class SearchFailureError(HStepError):
    """Raised when the invariant abscissa search runs out of range."""

    def __init__(self, limit: float) -> None:
        """Initialize the exception."""
        super().__init__(f"No invariant abscissa found below {limit:g}")


class IdentityMapError(HStepError):
    """Raised when both the drift and the measure vanish."""

    def __init__(self) -> None:
        """Initialize the exception."""
        super().__init__("beta = 0 with a zero measure is the identity map")


class InvalidTraceError(HStepError):
    """Raised when an orbit trace cannot support a diagnostic."""

    def __init__(self, reason: str) -> None:
        """Initialize the exception."""
        super().__init__(f"Invalid orbit trace: {reason}")


class DegenerateStepError(HStepError):
    """Raised when consecutive orbit points coincide numerically."""

    def __init__(self, index: int, size: float) -> None:
        """Initialize the exception."""
        super().__init__(f"Orbit step {index} has length {size:.3g}")
        self.index = index


class OrbitOverflowError(HStepError):
    """Raised when an orbit left the representable range before completing."""

    def __init__(self, trace: OrbitTrace) -> None:
        """Initialize the exception with the partial trace."""
        super().__init__(f"Orbit overflowed after {trace.length} steps")
        self.trace = trace
