"""Symmetry analysis of three-component diffusive Lotka-Volterra systems.

Exact rational-function expressions over jet space, prolongation of point
operators, Lie and conditional invariance checks, the classification
catalog, local equivalence transforms and the worked reduction example.
"""
from .catalog import entries, entry, instantiate, verify_entry
from .checker import (
    check_first_type,
    check_invariance,
    determining_equations,
    first_type_determining_equations,
)
from .expr import Expr, ExprError, exp, func, jet, param, var
from .jet import VectorField, prolong2
from .model import LIE, NONCLASSICAL, DLVSystem, RDSystem, first_type, load_system
from .parser import ParseError, parse
from .reduction import ExampleParams, exact_solution_7a, reduce, reduce_example
from .transforms import LocalTransform

__version__ = "0.1.0"

__all__ = [
    "DLVSystem", "RDSystem", "Expr", "ExprError", "ParseError", "VectorField",
    "LocalTransform", "ExampleParams", "LIE", "NONCLASSICAL",
    "parse", "var", "jet", "param", "func", "exp", "prolong2", "first_type",
    "load_system", "check_invariance", "check_first_type", "determining_equations",
    "first_type_determining_equations", "entries", "entry", "instantiate",
    "verify_entry", "reduce", "reduce_example", "exact_solution_7a",
]
