"""Exception hierarchy shared by every kpell module."""

from __future__ import annotations


class KPellError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(KPellError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class DomainError(KPellError, ValueError):
    """A mathematical function was applied outside its domain."""


class IndeterminateSignError(DomainError, ZeroDivisionError):
    """Division by an enclosure that contains zero."""

    def __init__(self, msg: str = "indeterminate sign divisor") -> None:
        super().__init__(msg)


class PrecisionError(KPellError, ArithmeticError):
    """Certified enclosures are too wide to decide the requested quantity.

    ``required_scale`` is a hint for the caller (decimal digits), when known.
    """

    def __init__(self, msg: str = "insufficient precision", required_scale: int | None = None) -> None:
        super().__init__(msg)
        self.required_scale = required_scale


class RankError(KPellError, ValueError):
    """Lattice basis vectors are linearly dependent."""


class DegenerateInputError(KPellError, ValueError):
    """Input admits no useful certified bound (e.g. degenerate target vector)."""
