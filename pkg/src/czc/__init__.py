"""Exact index iteration, prequantization homology ranks and orbit census."""

from __future__ import annotations

from .errors import CzcError, CzcInputError
from .exact import ExactReal, floor_mul, frac_gap, is_integer_multiple, parse_exact, rat, sqrt, surd
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CzcError",
    "CzcInputError",
    "ExactReal",
    "floor_mul",
    "frac_gap",
    "is_integer_multiple",
    "parse_exact",
    "rat",
    "sqrt",
    "surd",
]
