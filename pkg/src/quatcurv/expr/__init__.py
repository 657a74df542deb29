"""Expression language: parse, print, evaluate and differentiate real expressions."""

from .calculus import diff, substitute
from .evaluate import evaluate, evaluate_many
from .nodes import (
    FUNCTIONS,
    ONE,
    ZERO,
    Binary,
    Const,
    Expr,
    Unary,
    Var,
    as_expr,
    cos,
    cot,
    exp,
    ln,
    sin,
    sqrt,
    tan,
    to_text,
)
from .parser import DEFAULT_SYMBOLS, check_symbols, parse, tokenize

__all__ = [
    "FUNCTIONS",
    "ONE",
    "ZERO",
    "DEFAULT_SYMBOLS",
    "Binary",
    "Const",
    "Expr",
    "Unary",
    "Var",
    "as_expr",
    "check_symbols",
    "cos",
    "cot",
    "diff",
    "evaluate",
    "evaluate_many",
    "exp",
    "ln",
    "parse",
    "sin",
    "sqrt",
    "substitute",
    "tan",
    "to_text",
    "tokenize",
]
