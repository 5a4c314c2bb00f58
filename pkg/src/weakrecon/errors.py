"""Exception hierarchy.

Every error raised by the package derives from :class:`WeakValueError`.
Validation failures carry the list of violated invariants so callers (the CLI
in particular) can name them.
"""

from __future__ import annotations


class WeakValueError(Exception):
    """Base class for all package errors."""


class ValidationError(WeakValueError, ValueError):
    def __init__(self, message: str, invariants: list[str] | None = None):
        super().__init__(message)
        self.invariants = list(invariants or [])


class NotHermitian(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["hermitian"])


class ZeroVector(ValidationError):
    def __init__(self, message: str = "vector norm is zero"):
        super().__init__(message, ["nonzero vector"])


class DimensionMismatch(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["dimension"])


class NotOrthogonal(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["orthogonal"])


class IncompleteBasis(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["complete basis"])


class DegeneratePhase(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["phase"])


class BadParameter(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["parameter"])


class UnknownScenario(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, ["scenario name"])


class ParseError(ValidationError):
    """Malformed scenario document; ``field`` and ``line`` locate the problem."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        text = f"{message} ({', '.join(where)})" if where else message
        super().__init__(text, ["parse"])
        self.field = field
        self.line = line


class NullOutcome(WeakValueError):
    """Selection probability Tr(rho P) is too small to condition on."""

    invariants = ["selection probability"]


class BadSpectrum(WeakValueError):
    """Born probabilities over an observable's spectrum do not sum to one."""


class EmptySelection(WeakValueError):
    """Too few 'yes' shots to estimate the selected-state mean."""
