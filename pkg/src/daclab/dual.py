"""First-order dual numbers for forward-mode differentiation.

A ``Dual`` carries a value and the directional derivative of that value
along one tangent direction.  The helpers (``dexp``, ``dtanh``, ...)
dispatch on type so the same arithmetic code runs in plain float mode and
in dual mode; this is what guarantees that the primal part of a dual
evaluation equals the float evaluation bit for bit.
"""

from __future__ import annotations

import math


class Dual:
    __slots__ = ("a", "b")

    def __init__(self, a: float, b: float = 0.0):
        self.a = float(a)
        self.b = float(b)

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a + other.a, self.b + other.b)
        return Dual(self.a + other, self.b)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a - other.a, self.b - other.b)
        return Dual(self.a - other, self.b)

    def __rsub__(self, other):
        return Dual(other - self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a * other.a, self.a * other.b + self.b * other.a)
        return Dual(self.a * other, self.b * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a / other.a, (self.b * other.a - self.a * other.b) / (other.a * other.a))
        return Dual(self.a / other, self.b / other)

    def __rtruediv__(self, other):
        return Dual(other / self.a, -other * self.b / (self.a * self.a))

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise TypeError("dual powers support non-negative integer exponents only")
        out = Dual(1.0, 0.0)
        for _ in range(n):
            out = out * self
        return out

    # comparisons act on the primal part (piece-wise differentiation) ------
    def __lt__(self, other):
        return self.a < value_of(other)

    def __le__(self, other):
        return self.a <= value_of(other)

    def __gt__(self, other):
        return self.a > value_of(other)

    def __ge__(self, other):
        return self.a >= value_of(other)


def value_of(x) -> float:
    return x.a if isinstance(x, Dual) else float(x)


def tangent_of(x) -> float:
    return x.b if isinstance(x, Dual) else 0.0


def dexp(x):
    if isinstance(x, Dual):
        e = math.exp(x.a)
        return Dual(e, e * x.b)
    return math.exp(x)


def dlog(x):
    if isinstance(x, Dual):
        return Dual(math.log(x.a), x.b / x.a)
    return math.log(x)


def dtanh(x):
    if isinstance(x, Dual):
        t = math.tanh(x.a)
        return Dual(t, (1.0 - t * t) * x.b)
    return math.tanh(x)


def dclamp(x, lo: float, hi: float):
    """Clamp with zero tangent outside the interval."""
    if isinstance(x, Dual):
        if math.isnan(x.a):
            raise ValueError("NaN in clamp")
        if x.a < lo:
            return Dual(lo, 0.0)
        if x.a > hi:
            return Dual(hi, 0.0)
        return x
    if math.isnan(x):
        raise ValueError("NaN in clamp")
    return min(max(x, lo), hi)


def is_finite(x) -> bool:
    if isinstance(x, Dual):
        return math.isfinite(x.a)
    return math.isfinite(x)
