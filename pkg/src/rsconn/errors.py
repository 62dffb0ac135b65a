"""Exception hierarchy.

Every error raised by the library derives from :class:`RSConnError`.  The
CLI maps the concrete classes onto its exit-code table.
"""

from __future__ import annotations

from fractions import Fraction


class RSConnError(Exception):
    """Base class for all library errors."""


class IncompatibleAlgebraError(RSConnError, ValueError):
    """Operands live over different parameter algebras."""


class NonUnitError(RSConnError, ZeroDivisionError):
    """An element (or series, or matrix) that must be invertible is not."""


class UnsupportedExponentFieldError(RSConnError, ValueError):
    """A characteristic polynomial does not split over the rationals."""

    def __init__(self, message: str, factor: list[Fraction] | None = None):
        super().__init__(message)
        self.factor = factor


class ResonanceError(RSConnError, ValueError):
    """Two exponents differ by a nonzero integer where that is forbidden."""

    def __init__(self, message: str, pair: tuple[Fraction, Fraction] | None = None,
                 difference: Fraction | None = None):
        super().__init__(message)
        self.pair = pair
        self.difference = difference


class NotLogarithmicError(RSConnError, ValueError):
    """A coefficient matrix has a pole at x = 0."""

    def __init__(self, message: str, entries: list[tuple[int, int, int]] | None = None):
        super().__init__(message)
        # (row, col, valuation) of every offending entry
        self.entries = entries or []


class PreconditionError(RSConnError, ValueError):
    """Input violates a documented precondition (bad shape, bad argument)."""


class ParseError(RSConnError, ValueError):
    """A system file could not be parsed or validated."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class StepBudgetExceeded(RSConnError, RuntimeError):
    """A long-running reduction hit its step budget."""


class InternalError(RSConnError, RuntimeError):
    """An invariant that should be impossible to break was broken."""
