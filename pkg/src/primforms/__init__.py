"""Exact q-expansion computations with modular forms of small level.

Levels 1, 2, 3, 4, 6, 8 and 9; Hecke eigenforms, their sign classes and
verification of explicit polynomial formulas for primitive forms.
"""
from .exactnum import IntPoly, QuadExt, Rational
from .qseries import PrecisionError, QSeries

__all__ = ["IntPoly", "QuadExt", "Rational", "PrecisionError", "QSeries"]
__version__ = "0.1.0"
