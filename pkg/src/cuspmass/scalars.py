"""Exact scalar ring Q(sqrt(p)) for zero-tolerance local-integral audits.

Elements are pairs (u, v) of rationals representing u + v*sqrt(p).  The ring
is closed under +, -, *, / and integer powers; equality is componentwise.
All local-integral quantities lie in this ring when the Satake parameters
are rational, which is what makes the exact-mode identities checkable with
no floating tolerance at all.
"""

from __future__ import annotations

import math
from fractions import Fraction


class QuadExt:
    """u + v*sqrt(p) with exact rational u, v."""

    __slots__ = ("p", "u", "v")

    def __init__(self, p: int, u, v=0):
        if p < 2:
            raise ValueError("p must be a prime >= 2")
        self.p = int(p)
        self.u = Fraction(u)
        self.v = Fraction(v)

    @classmethod
    def sqrt_p(cls, p: int) -> "QuadExt":
        return cls(p, 0, 1)

    @classmethod
    def from_rational(cls, p: int, u) -> "QuadExt":
        return cls(p, u, 0)

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.p != self.p:
                raise ValueError(f"mixed radicands sqrt({self.p}) and sqrt({other.p})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.p, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.p, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.p, self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.p, o.u - self.u, o.v - self.v)

    def __neg__(self):
        return QuadExt(self.p, -self.u, -self.v)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(
            self.p,
            self.u * o.u + self.p * self.v * o.v,
            self.u * o.v + self.v * o.u,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        norm = self.u * self.u - self.p * self.v * self.v
        if norm == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.p, self.u / norm, -self.v / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExt(self.p, 1, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.v == 0 and self.u == other
        if isinstance(other, QuadExt):
            return self.p == other.p and self.u == other.u and self.v == other.v
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.u, self.v))

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def as_rational(self) -> Fraction:
        if self.v != 0:
            raise ValueError(f"{self!r} is irrational")
        return self.u

    def __float__(self) -> float:
        return float(self.u) + float(self.v) * math.sqrt(self.p)

    def __abs__(self) -> float:
        return abs(float(self))

    def __repr__(self):
        return f"QuadExt(p={self.p}, {self.u} + {self.v}*sqrt({self.p}))"
