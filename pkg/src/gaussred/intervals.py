"""Rational interval enclosures for quantities involving real powers.

An ``Enclosure`` is a closed interval [lo, hi] with rational endpoints.
Rational powers of rationals are enclosed with integer roots (gmpy2), so
perfect powers come out exact.  Comparisons are three-valued: True, False
or None when the enclosures overlap at the current precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .qjson import q, unq

DEFAULT_BITS = 64


class Undecided(ArithmeticError):
    """Raised when a discrete decision cannot be made at the current precision."""


def _root_floor(n: int, k: int) -> tuple[int, bool]:
    root, exact = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(root), bool(exact)


def rational_root(x: Fraction, k: int, bits: int = DEFAULT_BITS) -> "Enclosure":
    """Enclosure of x^(1/k) for x >= 0 with relative width about 2^-bits."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("root of a negative number")
    if k == 1 or x == 0:
        return Enclosure.exact(x)
    a, b = x.numerator, x.denominator
    base = a * b ** (k - 1)
    root, exact = _root_floor(base, k)
    if exact:
        return Enclosure.exact(Fraction(root, b))
    shift = bits + 2
    while True:
        root, exact = _root_floor(base << (k * shift), k)
        if root.bit_length() > bits + 1:
            break
        shift += bits + 1 - root.bit_length() + 1
    den = b << shift
    if exact:
        return Enclosure.exact(Fraction(root, den))
    return Enclosure(Fraction(root, den), Fraction(root + 1, den))


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value) -> "Enclosure":
        value = Fraction(value)
        return cls(value, value)

    @classmethod
    def of(cls, value) -> "Enclosure":
        return value if isinstance(value, Enclosure) else cls.exact(value)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        if not self.is_exact:
            raise Undecided("enclosure is not a single rational")
        return self.lo

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def rel_width(self) -> Fraction:
        scale = max(abs(self.lo), abs(self.hi))
        return Fraction(0) if scale == 0 else self.width / scale

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        if self.is_exact:
            return f"Enclosure({self.lo})"
        return f"Enclosure([{float(self.lo):.6g}, {float(self.hi):.6g}])"

    def __contains__(self, x):
        return self.lo <= Fraction(x) <= self.hi

    def __add__(self, other):
        other = Enclosure.of(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-Enclosure.of(other))

    def __rsub__(self, other):
        return Enclosure.of(other) - self

    def __mul__(self, other):
        other = Enclosure.of(other)
        prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return Enclosure(min(prods), max(prods))

    __rmul__ = __mul__

    def reciprocal(self):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("enclosure contains zero")
        return Enclosure(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * Enclosure.of(other).reciprocal()

    def __rtruediv__(self, other):
        return Enclosure.of(other) * self.reciprocal()

    def ipow(self, k: int):
        if k < 0:
            return self.ipow(-k).reciprocal()
        if self.lo >= 0:
            return Enclosure(self.lo**k, self.hi**k)
        if self.hi <= 0:
            lo, hi = self.hi**k, self.lo**k
            return Enclosure(min(lo, hi), max(lo, hi))
        vals = [self.lo**k, self.hi**k, Fraction(0)]
        return Enclosure(min(vals), max(vals))

    def __pow__(self, exponent):
        return power(self, exponent)

    # three-valued comparisons
    def lt(self, other):
        other = Enclosure.of(other)
        if self.hi < other.lo:
            return True
        if self.lo >= other.hi:
            return False
        return None

    def le(self, other):
        other = Enclosure.of(other)
        if self.hi <= other.lo:
            return True
        if self.lo > other.hi:
            return False
        return None

    def ceil(self) -> int:
        lo, hi = math.ceil(self.lo), math.ceil(self.hi)
        if lo != hi:
            raise Undecided("ceiling not determined at this precision")
        return lo

    def floor(self) -> int:
        lo, hi = math.floor(self.lo), math.floor(self.hi)
        if lo != hi:
            raise Undecided("floor not determined at this precision")
        return lo

    def to_json(self):
        if self.is_exact:
            return q(self.lo)
        return {"lo": q(self.lo), "hi": q(self.hi)}

    @classmethod
    def from_json(cls, data) -> "Enclosure":
        if isinstance(data, dict):
            return cls(unq(data["lo"]), unq(data["hi"]))
        return cls.exact(unq(data))


def power(base, exponent, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of base^exponent for a positive base and rational exponent."""
    base = Enclosure.of(base)
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        return base.ipow(exponent.numerator)
    if base.lo <= 0:
        raise ValueError("real power needs a positive base")
    p, k = exponent.numerator, exponent.denominator
    if p < 0:
        return power(base, -exponent, bits).reciprocal()
    lo = rational_root(base.lo**p, k, bits).lo
    hi = rational_root(base.hi**p, k, bits).hi
    return Enclosure(lo, hi)


def emin(*values) -> Enclosure:
    vals = [Enclosure.of(v) for v in values]
    return Enclosure(min(v.lo for v in vals), min(v.hi for v in vals))


def emax(*values) -> Enclosure:
    vals = [Enclosure.of(v) for v in values]
    return Enclosure(max(v.lo for v in vals), max(v.hi for v in vals))
