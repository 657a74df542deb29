"""Numeric evaluation of expression DAGs.

Works on Python floats or on numpy arrays of any (broadcastable) shape, so a
whole batch of sample points is evaluated in one pass.  Leaving a function's
real domain raises DomainError; NaN and Inf never escape.
"""

from __future__ import annotations

from typing import Mapping, Sequence, Union

import numpy as np

from ..errors import DomainError, UnboundVariable
from .nodes import Binary, Const, Expr, Unary, Var

Value = Union[float, np.ndarray]

# |sin| or |cos| below this counts as a pole of cot/tan
POLE_TOL = 1e-12


def _checked(result, what: str):
    if not np.all(np.isfinite(result)):
        raise DomainError(f"{what} produced a non-finite value")
    return result


def _unary(op: str, a):
    if op == "neg":
        return -a
    if op == "sin":
        return np.sin(a)
    if op == "cos":
        return np.cos(a)
    if op == "exp":
        return _checked(np.exp(a), "exp")
    if op == "ln":
        if np.any(a <= 0):
            raise DomainError("ln of a non-positive number")
        return np.log(a)
    if op == "sqrt":
        if np.any(a < 0):
            raise DomainError("sqrt of a negative number")
        return np.sqrt(a)
    if op == "tan":
        c = np.cos(a)
        if np.any(np.abs(c) < POLE_TOL):
            raise DomainError("tan at a pole")
        return np.sin(a) / c
    if op == "cot":
        s = np.sin(a)
        if np.any(np.abs(s) < POLE_TOL):
            raise DomainError("cot at a multiple of pi")
        return np.cos(a) / s
    raise ValueError(op)


def _binary(op: str, a, b):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if np.any(b == 0):
            raise DomainError("division by zero")
        return _checked(a / b, "division")
    if op == "pow":
        b = float(b)
        if not b.is_integer() and np.any(a < 0):
            raise DomainError("non-integer power of a negative number")
        if b < 0 and np.any(a == 0):
            raise DomainError("negative power of zero")
        return _checked(np.power(a, b), "power")
    raise ValueError(op)


def evaluate_many(exprs: Sequence[Expr], env: Mapping[str, Value]) -> list[Value]:
    """Evaluate several expressions sharing one memo table."""
    memo: dict[int, Value] = {}
    with np.errstate(all="ignore"):
        for root in exprs:
            _eval_into(root, env, memo)
    out = []
    for e in exprs:
        v = memo[id(e)]
        out.append(float(v) if np.ndim(v) == 0 else v)
    return out


def evaluate(e: Expr, env: Mapping[str, Value]) -> Value:
    return evaluate_many([e], env)[0]


def _eval_into(root: Expr, env, memo: dict):
    # iterative post-order over the DAG
    stack = [root]
    while stack:
        node = stack[-1]
        key = id(node)
        if key in memo:
            stack.pop()
            continue
        if isinstance(node, Const):
            memo[key] = np.float64(node.value)
            stack.pop()
        elif isinstance(node, Var):
            try:
                value = env[node.name]
            except KeyError:
                raise UnboundVariable(f"variable {node.name!r} is not bound") from None
            memo[key] = np.asarray(value, dtype=float)
            stack.pop()
        elif isinstance(node, Unary):
            a = memo.get(id(node.arg))
            if a is None:
                stack.append(node.arg)
                continue
            memo[key] = _unary(node.op, a)
            stack.pop()
        elif isinstance(node, Binary):
            a = memo.get(id(node.left))
            b = memo.get(id(node.right))
            if a is None or b is None:
                if a is None:
                    stack.append(node.left)
                if b is None:
                    stack.append(node.right)
                continue
            memo[key] = _binary(node.op, a, b)
            stack.pop()
        else:
            raise TypeError(f"not an expression node: {node!r}")
