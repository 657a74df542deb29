"""Expression AST.

Nodes are immutable and hash-consed: building the same tree twice returns the
same object, so structural equality is identity and shared subexpressions are
stored (and later differentiated and evaluated) once.

Two construction paths exist.  The node classes themselves build exactly the
requested shape (the parser uses these).  The module-level helpers ``add``,
``mul``, ... and the Python operator overloads fold constants and drop
identities (``0+e``, ``1*e``, ``0*e``, ``e^1`` ...) and are what the symbolic
differentiator and the operator code use.
"""

from __future__ import annotations

import math
import threading
import weakref
from typing import Union

FUNCTIONS = ("sin", "cos", "tan", "cot", "exp", "ln", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")

_table: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()
_lock = threading.Lock()


def _make(cls, key, **fields):
    with _lock:
        obj = _table.get(key)
        if obj is None:
            obj = object.__new__(cls)
            for name, value in fields.items():
                object.__setattr__(obj, name, value)
            object.__setattr__(obj, "_derivs", {})
            object.__setattr__(obj, "_free", None)
            _table[key] = obj
    return obj


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ("_derivs", "_free", "__weakref__")

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return _rebuild, (str(self),)

    # arithmetic builds simplified trees
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __str__(self) -> str:
        return to_text(self)

    @property
    def free_symbols(self) -> frozenset[str]:
        if self._free is None:
            object.__setattr__(self, "_free", _free_symbols(self))
        return self._free

    def is_constant(self) -> bool:
        return not self.free_symbols


class Const(Expr):
    __slots__ = ("value",)

    def __new__(cls, value: float):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite constant {value!r}")
        if value == 0.0:
            value = 0.0  # fold -0.0
        return _make(cls, (cls, value), value=value)

    def __repr__(self):
        return f"Const({self.value!r})"


class Var(Expr):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        return _make(cls, (cls, name), name=name)

    def __repr__(self):
        return f"Var({self.name!r})"


class Unary(Expr):
    """``neg`` or one of FUNCTIONS applied to ``arg``."""

    __slots__ = ("op", "arg")

    def __new__(cls, op: str, arg: Expr):
        if op != "neg" and op not in FUNCTIONS:
            raise ValueError(f"unknown unary op {op!r}")
        return _make(cls, (cls, op, id(arg)), op=op, arg=arg)

    def __repr__(self):
        return f"Unary({self.op!r}, {self.arg!r})"


class Binary(Expr):
    __slots__ = ("op", "left", "right")

    def __new__(cls, op: str, left: Expr, right: Expr):
        if op not in BINARY_OPS:
            raise ValueError(f"unknown binary op {op!r}")
        if op == "pow" and not right.is_constant():
            raise ValueError("exponent must be a constant expression")
        return _make(cls, (cls, op, id(left), id(right)), op=op, left=left, right=right)

    def __repr__(self):
        return f"Binary({self.op!r}, {self.left!r}, {self.right!r})"


def _rebuild(text):
    from .parser import parse

    return parse(text)


def _free_symbols(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Unary):
        return e.arg.free_symbols
    return e.left.free_symbols | e.right.free_symbols


ExprLike = Union[Expr, int, float, str]


def as_expr(x: ExprLike) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(x, (int, float)):
        return Const(x)
    if isinstance(x, str):
        from .parser import parse

        return parse(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


ZERO = Const(0.0)
ONE = Const(1.0)


def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def _fold(op: str, *args: Expr) -> Expr | None:
    """Evaluate an all-constant node, or None if that would leave the domain."""
    from .evaluate import evaluate
    from ..errors import DomainError

    node = Unary(op, args[0]) if len(args) == 1 else Binary(op, *args)
    try:
        return Const(evaluate(node, {}))
    except (DomainError, ValueError, OverflowError):
        return None


def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Binary("add", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Binary("sub", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Binary("mul", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 1.0):
        return a
    if _is(a, 0.0) and not _is(b, 0.0):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold("div", a, b) or Binary("div", a, b)
    return Binary("div", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def power(base: Expr, exponent: Expr) -> Expr:
    if _is(exponent, 1.0):
        return base
    if _is(exponent, 0.0):
        return ONE
    if isinstance(base, Const) and isinstance(exponent, Const):
        return _fold("pow", base, exponent) or Binary("pow", base, exponent)
    return Binary("pow", base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if isinstance(arg, Const):
        folded = _fold(name, arg)
        if folded is not None:
            return folded
    return Unary(name, arg)


def sin(a: ExprLike) -> Expr:
    return func("sin", as_expr(a))


def cos(a: ExprLike) -> Expr:
    return func("cos", as_expr(a))


def tan(a: ExprLike) -> Expr:
    return func("tan", as_expr(a))


def cot(a: ExprLike) -> Expr:
    return func("cot", as_expr(a))


def exp(a: ExprLike) -> Expr:
    return func("exp", as_expr(a))


def ln(a: ExprLike) -> Expr:
    return func("ln", as_expr(a))


def sqrt(a: ExprLike) -> Expr:
    return func("sqrt", as_expr(a))


# printing

_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5
_BINARY_PREC = {"add": _ADD, "sub": _ADD, "mul": _MUL, "div": _MUL, "pow": _POW}
_BINARY_SYM = {"add": " + ", "sub": " - ", "mul": "*", "div": "/", "pow": "^"}


def _prec(e: Expr) -> int:
    if isinstance(e, Const):
        return _NEG if e.value < 0 else _ATOM
    if isinstance(e, Var):
        return _ATOM
    if isinstance(e, Unary):
        return _NEG if e.op == "neg" else _ATOM
    return _BINARY_PREC[e.op]


def format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _wrap(text: str, cond: bool) -> str:
    return f"({text})" if cond else text


def to_text(e: Expr) -> str:
    """Render ``e`` so that parsing the text rebuilds the identical tree."""
    if isinstance(e, Const):
        return format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op != "neg":
            return f"{e.op}({to_text(e.arg)})"
        # "-2" would reparse as a negative literal, so guard constants
        inner = to_text(e.arg)
        return "-" + _wrap(inner, isinstance(e.arg, Const) or _prec(e.arg) < _NEG)
    p = _BINARY_PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "pow":
        return f"{_wrap(left, _prec(e.left) <= _POW)}^{_wrap(right, _prec(e.right) < _NEG)}"
    return (
        _wrap(left, _prec(e.left) < p)
        + _BINARY_SYM[e.op]
        + _wrap(right, _prec(e.right) <= p)
    )
