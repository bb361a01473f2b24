"""Certified computations around k-generalized Pell numbers with 7-smooth values."""

from .bigfix import FixedReal
from .errors import (
    DegenerateInputError,
    DomainError,
    IndeterminateSignError,
    KPellError,
    ParameterError,
    PrecisionError,
    RankError,
)
from .pell import dominant_root, pell_number, pell_stream, pell_table

__all__ = [
    "DegenerateInputError",
    "DomainError",
    "FixedReal",
    "IndeterminateSignError",
    "KPellError",
    "ParameterError",
    "PrecisionError",
    "RankError",
    "dominant_root",
    "pell_number",
    "pell_stream",
    "pell_table",
]

__version__ = "0.1.0"
