"""Recursive-descent parser for the field expression grammar.

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := primary ("^" exponent)?
    exponent := "-" exponent | power
    primary  := NUMBER | "pi" | IDENT | IDENT "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus (``-q1^2`` is ``-(q1^2)``) and is
right-associative; everything else is left-associative.  A minus sign directly
in front of a numeric literal (and not followed by ``^``) produces a negative
constant instead of a negation node.  Exponents must be constant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from ..errors import ExprSyntaxError, UnknownFunction, UnknownVariable
from .nodes import FUNCTIONS, Binary, Const, Expr, Unary, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

CONSTANTS = {"pi": math.pi}
DEFAULT_SYMBOLS = ("q1", "q2", "q3")


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, end
    text: str
    offset: int  # byte offset


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", byte_pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), byte_pos))
        byte_pos += len(m.group().encode("utf-8"))
        pos = m.end()
    tokens.append(Token("end", "", byte_pos))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"{message}, found {found}", tok.offset, self.text)

    def expect(self, text: str):
        if self.tok.text != text or self.tok.kind != "op":
            self.error(f"expected {text!r}")
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.error("expected operator or end of input")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = "add" if self.advance().text == "+" else "sub"
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = "mul" if self.advance().text == "*" else "div"
            left = Binary(op, left, self.unary())
        return left

    def _negative_literal(self) -> Optional[Expr]:
        # "-2" is a literal, "-2^2" is -(2^2)
        if self.peek().kind == "num" and self.peek(2).text != "^":
            self.advance()
            return Const(-float(self.advance().text))
        return None

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            lit = self._negative_literal()
            if lit is not None:
                return lit
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            start = self.tok
            exponent = self.exponent()
            if not exponent.is_constant():
                self.error("exponent must be a constant expression", start)
            return Binary("pow", base, exponent)
        return base

    def exponent(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            lit = self._negative_literal()
            if lit is not None:
                return lit
            self.advance()
            return Unary("neg", self.exponent())
        return self.power()

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if tok.text not in FUNCTIONS:
                    err = UnknownFunction(f"unknown function {tok.text!r} at offset {tok.offset}")
                    err.offset = tok.offset
                    raise err
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            if tok.text in CONSTANTS:
                return Const(CONSTANTS[tok.text])
            if tok.text in FUNCTIONS:
                self.error(f"expected '(' after function {tok.text!r}")
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected operand")


def check_symbols(e: Expr, symbols: Iterable[str]) -> Expr:
    """Raise UnknownVariable if ``e`` references anything outside ``symbols``."""
    unknown = e.free_symbols - set(symbols)
    if unknown:
        raise UnknownVariable(f"unknown variable(s): {', '.join(sorted(unknown))}")
    return e


def parse(text: str, symbols: Optional[Iterable[str]] = None) -> Expr:
    """Parse ``text``; when ``symbols`` is given, also run the binding check."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    e = _Parser(text).parse()
    if symbols is not None:
        check_symbols(e, symbols)
    return e
