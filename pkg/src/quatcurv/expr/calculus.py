"""Exact partial derivatives and variable substitution."""

from __future__ import annotations

from typing import Mapping

from .nodes import (
    ONE,
    ZERO,
    Binary,
    Const,
    Expr,
    Unary,
    Var,
    add,
    cos,
    div,
    func,
    mul,
    neg,
    power,
    sin,
    sqrt,
    sub,
)


def diff(e: Expr, var: str) -> Expr:
    """Partial derivative of ``e`` with respect to the variable ``var``.

    Results are cached on the node, so repeated differentiation of shared
    subtrees costs nothing.
    """
    cached = e._derivs.get(var)
    if cached is not None:
        return cached
    if var not in e.free_symbols:
        result = ZERO
    else:
        result = _diff(e, var)
    e._derivs[var] = result
    return result


def _diff(e: Expr, var: str) -> Expr:
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Unary):
        a = e.arg
        da = diff(a, var)
        op = e.op
        if op == "neg":
            return neg(da)
        if op == "sin":
            return mul(cos(a), da)
        if op == "cos":
            return neg(mul(sin(a), da))
        if op == "tan":
            return div(da, power(cos(a), Const(2)))
        if op == "cot":
            return neg(div(da, power(sin(a), Const(2))))
        if op == "exp":
            return mul(e, da)
        if op == "ln":
            return div(da, a)
        if op == "sqrt":
            return div(da, mul(Const(2), sqrt(a)))
        raise ValueError(op)
    a, b = e.left, e.right
    op = e.op
    if op == "add":
        return add(diff(a, var), diff(b, var))
    if op == "sub":
        return sub(diff(a, var), diff(b, var))
    if op == "mul":
        return add(mul(diff(a, var), b), mul(a, diff(b, var)))
    if op == "div":
        da, db = diff(a, var), diff(b, var)
        if db is ZERO:
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, Const(2)))
    if op == "pow":
        # exponent is constant by construction
        return mul(mul(b, power(a, sub(b, ONE))), diff(a, var))
    raise ValueError(op)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, rebuilding with simplifying constructors."""
    memo: dict[int, Expr] = {}

    def go(node: Expr) -> Expr:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if not (node.free_symbols & mapping.keys()):
            out = node
        elif isinstance(node, Var):
            out = mapping[node.name]
        elif isinstance(node, Unary):
            arg = go(node.arg)
            out = neg(arg) if node.op == "neg" else func(node.op, arg)
        else:
            left, right = go(node.left), go(node.right)
            out = {"add": add, "sub": sub, "mul": mul, "div": div, "pow": power}[node.op](left, right)
        memo[id(node)] = out
        return out

    return go(e)
