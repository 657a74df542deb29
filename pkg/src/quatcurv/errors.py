"""Exception hierarchy shared by every quatcurv module."""

from __future__ import annotations


class QuatCurvError(Exception):
    """Base class for all errors raised by quatcurv."""


# quaternion algebra

class ZeroDivisorOrZero(QuatCurvError, ZeroDivisionError):
    """Raised when inverting zero or a zero divisor of H(C)."""


# expression language

class ExprError(QuatCurvError):
    pass


class ExprSyntaxError(ExprError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset (UTF-8) of the offending token.
    """

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownFunction(ExprError, ValueError):
    pass


class UnknownVariable(ExprError, ValueError):
    pass


class UnboundVariable(ExprError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the real domain of a function (ln, sqrt, 1/0, cot(k*pi), ...)."""


# geometry

class GeometryError(QuatCurvError):
    pass


class UnknownChart(GeometryError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class OutOfDomain(GeometryError, ValueError):
    def __init__(self, message: str, point=None):
        self.point = point
        super().__init__(message)


class DegenerateMetric(GeometryError, ValueError):
    pass


class NonOrthogonalChart(GeometryError, ValueError):
    pass


class DefinitionError(GeometryError, ValueError):
    """A chart/field definition document does not match its schema."""


# operators

class InvalidLameParams(QuatCurvError, ValueError):
    pass
