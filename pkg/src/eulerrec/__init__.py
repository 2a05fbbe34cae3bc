"""Exact generation, moments and limit laws for Eulerian-type polynomial recurrences."""
from .poly import Poly
from .expr import BiPoly, ExprError, parse_expr
from .recurrence import (RecurrenceSpec, SpecError, GenerationError, canonicalize,
                         generate_rows, load_spec, parse_spec, simple_spec)
from .catalog import builtin_spec, catalog_spec
from .classify import LimitLaw, classify

__all__ = [
    "Poly", "BiPoly", "ExprError", "parse_expr", "RecurrenceSpec", "SpecError",
    "GenerationError", "canonicalize", "generate_rows", "load_spec", "parse_spec",
    "simple_spec", "builtin_spec", "catalog_spec", "LimitLaw", "classify",
]
__version__ = "0.1.0"
