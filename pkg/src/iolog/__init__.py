"""Input/output logic over finite bounded lattices.

Norm closure, output operators, four kinds of permission system and an
executable verification suite, all computed on explicit finite algebras.
"""
from .algebra import (Binding, FiniteAlgebra, PropertyReport, build_algebra, catalog,
                      check_metaproperty, load_algebra)
from .norms import NormRelation, close, load_norms, naive_close, out, parse_rules
from .permissions import (dual_negative, dynamic_positive, generalized_dynamic,
                          negative_permission, static_positive)
from .syntax import evaluate, parse, to_text
from .verifier import run_check, run_suite

__version__ = "0.1.0"

__all__ = [
    "Binding", "FiniteAlgebra", "PropertyReport", "build_algebra", "catalog",
    "check_metaproperty", "load_algebra",
    "NormRelation", "close", "load_norms", "naive_close", "out", "parse_rules",
    "dual_negative", "dynamic_positive", "generalized_dynamic",
    "negative_permission", "static_positive",
    "evaluate", "parse", "to_text",
    "run_check", "run_suite",
]
