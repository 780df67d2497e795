"""Exception types shared across the package."""

from __future__ import annotations


class FadeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FadeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SeriesConvergenceError(FadeError, ArithmeticError):
    """A propagator series failed to meet its tolerance within the term cap."""

    def __init__(self, message: str, last_term_norm: float | None = None):
        super().__init__(message)
        self.last_term_norm = last_term_norm


class QuadratureError(FadeError, ArithmeticError):
    """Two quadrature refinement levels disagree beyond tolerance."""


class EvaluationError(FadeError, ArithmeticError):
    """Expression evaluation produced a non-finite or undefined value."""


class ParseError(FadeError, ValueError):
    """Syntax error in a problem-definition expression.

    Carries the byte offset of the failure and the set of tokens that
    would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected: " + ", ".join(expected) + ")"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class ConfigError(FadeError, ValueError):
    """A run configuration file or CLI argument is invalid."""
