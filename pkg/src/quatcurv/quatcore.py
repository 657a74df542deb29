"""Complex quaternions H(C).

A complex quaternion is ``a = a0 + a1*i1 + a2*i2 + a3*i3`` with complex
coefficients.  The complex unit ``1j`` commutes with the quaternionic units,
so the algebra is associative but not a division algebra: elements with
``a * conj(a) == 0`` are zero divisors.

Components are Python ``complex`` values throughout, including real
quaternions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import ZeroDivisorOrZero

Number = Union[int, float, complex]

ZERO_DIVISOR_RTOL = 1e-12


def _finite(z: complex) -> bool:
    return cmath.isfinite(z)


@dataclass(frozen=True)
class Quaternion:
    """Immutable complex quaternion with scalar part ``s`` and vector part ``v``."""

    s: complex = 0j
    v: tuple[complex, complex, complex] = (0j, 0j, 0j)

    def __post_init__(self):
        s = complex(self.s)
        v = tuple(complex(c) for c in self.v)
        if len(v) != 3:
            raise ValueError(f"vector part needs 3 components, got {len(v)}")
        if not (_finite(s) and all(_finite(c) for c in v)):
            raise ValueError("quaternion components must be finite")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_components(cls, comps: Iterable[Number]) -> "Quaternion":
        a0, a1, a2, a3 = comps
        return cls(a0, (a1, a2, a3))

    @classmethod
    def scalar(cls, a0: Number) -> "Quaternion":
        return cls(a0)

    @classmethod
    def vector(cls, a1: Number, a2: Number, a3: Number) -> "Quaternion":
        return cls(0, (a1, a2, a3))

    @property
    def components(self) -> tuple[complex, complex, complex, complex]:
        return (self.s, *self.v)

    def scalar_part(self) -> "Quaternion":
        return Quaternion(self.s)

    def vector_part(self) -> "Quaternion":
        return Quaternion(0, self.v)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.s + other.s, tuple(x + y for x, y in zip(self.v, other.v)))

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.s, tuple(-x for x in self.v))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Quaternion(self.s * other, tuple(x * other for x in self.v))
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        # complex scalars commute with every quaternion unit
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return Quaternion(self.s / other, tuple(x / other for x in self.v))
        return NotImplemented

    def __abs__(self) -> float:
        return qnorm(self)

    def conj(self) -> "Quaternion":
        return qconj(self)

    def is_close(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return max(abs(x - y) for x, y in zip(self.components, other.components)) <= tol

    def __str__(self) -> str:
        units = ("", "*i1", "*i2", "*i3")
        return " + ".join(f"({c.real:g}{c.imag:+g}j){u}" for c, u in zip(self.components, units))


def _coerce(x):
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float, complex)):
        return Quaternion(x)
    return NotImplemented


ONE = Quaternion(1)
I1 = Quaternion.vector(1, 0, 0)
I2 = Quaternion.vector(0, 1, 0)
I3 = Quaternion.vector(0, 0, 1)


def qdot(a: Quaternion, b: Quaternion) -> complex:
    """Bilinear (not Hermitian) dot product of the vector parts."""
    return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2]


def qcross(a: Quaternion, b: Quaternion) -> Quaternion:
    """Cross product of the vector parts, as a pure-vector quaternion."""
    a1, a2, a3 = a.v
    b1, b2, b3 = b.v
    return Quaternion(0, (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1))


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Full product ``a0 b0 - <a,b> + a0 b + b0 a + [a,b]``."""
    cross = qcross(a, b).v
    return Quaternion(
        a.s * b.s - qdot(a, b),
        tuple(a.s * bk + b.s * ak + ck for ak, bk, ck in zip(a.v, b.v, cross)),
    )


def qconj(a: Quaternion) -> Quaternion:
    return Quaternion(a.s, tuple(-x for x in a.v))


def qnorm(a: Quaternion) -> float:
    return math.sqrt(sum(abs(c) ** 2 for c in a.components))


def _self_product(a: Quaternion) -> complex:
    # a * conj(a) is always a complex scalar: a0^2 + <a, a>
    return a.s * a.s + qdot(a, a)


def _is_zero(a: Quaternion) -> bool:
    return all(c == 0 for c in a.components)


def _degenerate(a: Quaternion) -> bool:
    n = qnorm(a)
    return abs(_self_product(a)) <= ZERO_DIVISOR_RTOL * (1.0 + n * n)


def is_zero_divisor(a: Quaternion) -> bool:
    """True for nonzero ``a`` whose ``a * conj(a)`` vanishes (to tolerance)."""
    return not _is_zero(a) and _degenerate(a)


def qinv(a: Quaternion) -> Quaternion:
    """Inverse ``conj(a) / (a conj(a))``.

    Raises ZeroDivisorOrZero for zero and for zero divisors.
    """
    if _is_zero(a) or _degenerate(a):
        raise ZeroDivisorOrZero(f"{a} is zero or a zero divisor (a*conj(a) = {_self_product(a)})")
    return qconj(a) / _self_product(a)
