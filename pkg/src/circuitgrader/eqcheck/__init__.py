"""Deterministic final-answer equivalence engine.

Parses a LaTeX subset of circuit-analysis math and decides whether two
answers are equivalent: exact normal forms, tolerance-based numeric
comparison with deterministic sampling, unit conversion, and coefficient
comparison for reordered equations.
"""

from .compare import (
    DEFAULT_TOLERANCE,
    METHOD_CANONICAL,
    METHOD_SAMPLING,
    METHOD_UNIT,
    MatchVerdict,
    ParsedAnswer,
    Tolerance,
    answers_match,
    compare_equations,
    equivalent,
    parse_answer,
)
from .errors import (
    EqcheckError,
    EvalError,
    IncommensurableUnitsError,
    IncomparableError,
    ParseError,
    UnboundSymbolError,
    UnitError,
    UnknownUnitError,
)
from .evaluate import numeric_eval
from .nodes import Equation, Expr, free_symbols
from .normalize import normalize
from .parser import parse_any, parse_equation, parse_expr
from .render import render
from .units import DIMENSIONLESS, Quantity, Unit, convert_unit, parse_unit

__all__ = [
    "DEFAULT_TOLERANCE",
    "DIMENSIONLESS",
    "EqcheckError",
    "Equation",
    "EvalError",
    "Expr",
    "IncommensurableUnitsError",
    "IncomparableError",
    "MatchVerdict",
    "METHOD_CANONICAL",
    "METHOD_SAMPLING",
    "METHOD_UNIT",
    "ParseError",
    "ParsedAnswer",
    "Quantity",
    "Tolerance",
    "UnboundSymbolError",
    "Unit",
    "UnitError",
    "UnknownUnitError",
    "answers_match",
    "compare_equations",
    "convert_unit",
    "equivalent",
    "free_symbols",
    "normalize",
    "numeric_eval",
    "parse_answer",
    "parse_any",
    "parse_equation",
    "parse_expr",
    "parse_unit",
    "render",
]
