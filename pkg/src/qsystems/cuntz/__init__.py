"""Exact symbolic engine for concrete Cuntz-algebra computations.

Scalars live in the field Q(zeta16, 2^(1/4)); operator expressions are
linear combinations of reduced words in isometry families, with tensor
slots for two-dimensional (left x right) algebras.
"""

from .scalars import Ex
from .words import Gen, OperatorExpr, Endo, CuntzError
from .suites import run_suite, suite_names

__all__ = ["Ex", "Gen", "OperatorExpr", "Endo", "CuntzError",
           "run_suite", "suite_names"]
