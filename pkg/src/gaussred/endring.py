"""Exact arithmetic in End(E): either the integers or an imaginary quadratic
order Z + tau*Z, where tau is a root of t^2 + u*t + v.

Elements are ``x + y*tau``.  Coordinates are normally integers; rational
coordinates are allowed so the same type doubles as an element of the
fraction field (``is_integral`` tells the two apart).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational

__all__ = [
    "EndRing",
    "RingElem",
    "ZZ",
    "Content",
    "content",
    "CLASS_NUMBER_ONE_DISCRIMINANTS",
]

# Discriminants of the imaginary quadratic orders with class number one.
CLASS_NUMBER_ONE_DISCRIMINANTS = frozenset(
    {-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163}
)


def _num(value):
    if isinstance(value, bool):
        raise TypeError("booleans are not ring coordinates")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational):
        value = Fraction(value)
        return value.numerator if value.denominator == 1 else value
    raise TypeError(f"unsupported coordinate type {type(value).__name__}")


@dataclass(frozen=True)
class EndRing:
    """The ring End(E).  ``kind`` is ``"integers"`` or ``"order"``."""

    kind: str = "integers"
    u: int = 0
    v: int = 0

    def __post_init__(self):
        if self.kind == "integers":
            object.__setattr__(self, "u", 0)
            object.__setattr__(self, "v", 0)
        elif self.kind == "order":
            if self.u * self.u - 4 * self.v >= 0:
                raise ValueError(
                    f"t^2 + {self.u}t + {self.v} does not define an imaginary quadratic order"
                )
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    @classmethod
    def order(cls, u: int, v: int) -> "EndRing":
        return cls("order", int(u), int(v))

    @property
    def is_order(self) -> bool:
        return self.kind == "order"

    @property
    def rank(self) -> int:
        """Rank of the ring as a Z-module."""
        return 2 if self.is_order else 1

    @property
    def discriminant(self) -> int:
        return self.u * self.u - 4 * self.v if self.is_order else 1

    @property
    def is_principal(self) -> bool:
        return not self.is_order or self.discriminant in CLASS_NUMBER_ONE_DISCRIMINANTS

    def __call__(self, x=0, y=0) -> "RingElem":
        return RingElem(self, x, y)

    @property
    def zero(self) -> "RingElem":
        return RingElem(self, 0, 0)

    @property
    def one(self) -> "RingElem":
        return RingElem(self, 1, 0)

    @property
    def tau(self) -> "RingElem":
        if not self.is_order:
            raise ValueError("the integers have no tau generator")
        return RingElem(self, 0, 1)

    @cached_property
    def units(self) -> tuple["RingElem", ...]:
        """All units, found as the elements of norm one.

        Since 4*N(x + y tau) = (2x - uy)^2 + (4v - u^2) y^2, a unit has |y| <= 2.
        """
        if not self.is_order:
            return (self.one, RingElem(self, -1, 0))
        found = []
        for y in range(-2, 3):
            # (2x - uy)^2 = 4 - (4v - u^2) y^2
            rhs = 4 - (4 * self.v - self.u * self.u) * y * y
            if rhs < 0:
                continue
            w = math.isqrt(rhs)
            if w * w != rhs:
                continue
            for s in {w, -w}:
                if (s + self.u * y) % 2 == 0:
                    found.append(RingElem(self, (s + self.u * y) // 2, y))
        return tuple(sorted(set(found), key=lambda e: (e.x, e.y)))

    def complex_tau(self) -> complex:
        d = 4 * self.v - self.u * self.u
        return complex(-self.u / 2, math.sqrt(d) / 2)

    def to_json(self) -> dict:
        if self.is_order:
            return {"kind": "order", "u": self.u, "v": self.v}
        return {"kind": "integers"}

    @classmethod
    def from_json(cls, data: dict) -> "EndRing":
        kind = data.get("kind", "order" if "u" in data else "integers")
        if kind == "integers":
            return cls()
        return cls.order(int(data["u"]), int(data["v"]))


ZZ = EndRing()


class RingElem:
    """Element x + y*tau of End(E) (or of its fraction field)."""

    __slots__ = ("ring", "x", "y")

    def __init__(self, ring: EndRing, x=0, y=0):
        x, y = _num(x), _num(y)
        if not ring.is_order and y != 0:
            raise ValueError("tau-component must vanish over the integers")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    def __repr__(self):
        if not self.ring.is_order:
            return f"RingElem({self.x})"
        return f"RingElem({self.x} + {self.y}*tau)"

    def __str__(self):
        if not self.ring.is_order or self.y == 0:
            return str(self.x)
        return f"{self.x}{'+' if self.y >= 0 else '-'}{abs(self.y)}τ"

    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.ring == other.ring and self.x == other.x and self.y == other.y
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.x, self.y))

    def _coerce(self, other) -> "RingElem":
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise ValueError("cannot mix elements of different endomorphism rings")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RingElem(self.ring, other, 0)
        raise TypeError(f"cannot combine RingElem with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        return RingElem(self.ring, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return RingElem(self.ring, self.x - other.x, self.y - other.y)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return RingElem(self.ring, -self.x, -self.y)

    def __mul__(self, other):
        other = self._coerce(other)
        u, v = self.ring.u, self.ring.v
        a, b, c, d = self.x, self.y, other.x, other.y
        # tau^2 = -u*tau - v
        return RingElem(self.ring, a * c - v * b * d, a * d + b * c - u * b * d)

    __rmul__ = __mul__

    def conj(self) -> "RingElem":
        return RingElem(self.ring, self.x - self.ring.u * self.y, -self.y)

    def norm_sq(self):
        """|x + y tau|^2 = x^2 - u x y + v y^2, exact."""
        u, v = self.ring.u, self.ring.v
        return self.x * self.x - u * self.x * self.y + v * self.y * self.y

    def __abs__(self) -> float:
        return math.sqrt(self.norm_sq())

    def __bool__(self):
        return self.x != 0 or self.y != 0

    @property
    def is_integral(self) -> bool:
        return isinstance(self.x, int) and isinstance(self.y, int)

    def is_unit(self) -> bool:
        return self.is_integral and self.norm_sq() == 1

    def __truediv__(self, other):
        """Division in the fraction field; the result may have rational coordinates."""
        other = self._coerce(other)
        n = other.norm_sq()
        if n == 0:
            raise ZeroDivisionError("division by zero ring element")
        num = self * other.conj()
        return RingElem(self.ring, Fraction(num.x, n), Fraction(num.y, n))

    def exact_div(self, other) -> "RingElem":
        """Quotient in the ring itself; raises ValueError if it does not exist."""
        q = self / other
        if not q.is_integral:
            raise ValueError(f"{other} does not divide {self}")
        return q

    def divides(self, other) -> bool:
        other = self._coerce(other)
        if not self:
            return not other
        return (other / self).is_integral

    def to_complex(self) -> complex:
        if not self.ring.is_order:
            return complex(self.x)
        return float(self.x) + float(self.y) * self.ring.complex_tau()

    def real_part(self):
        """Real part x - u*y/2 (exact)."""
        return self.x - Fraction(self.ring.u * self.y, 2) if self.ring.is_order else self.x

    def regular_rep(self):
        """2x2 matrix of multiplication by self on coordinates (c0, c1) of c0 + c1*tau.

        For the integers this is the 1x1 matrix [x].
        """
        if not self.ring.is_order:
            return ((self.x,),)
        u, v = self.ring.u, self.ring.v
        return ((self.x, -v * self.y), (self.y, self.x - u * self.y))

    def canonical(self) -> tuple["RingElem", "RingElem"]:
        """Return (unit, unit*self) with unit*self in the canonical sector.

        Over the integers the canonical representative is positive.  Over an
        order with k units it is the associate whose argument lies in
        [0, 2*pi/k).
        """
        if not self:
            return self.ring.one, self
        for w in self.ring.units:
            cand = w * self
            if _in_sector(cand, len(self.ring.units)):
                return w, cand
        raise AssertionError("no associate in the canonical sector")  # pragma: no cover

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "x": _enc(self.x), "y": _enc(self.y)}

    @classmethod
    def from_json(cls, data: dict) -> "RingElem":
        return cls(EndRing.from_json(data["ring"]), _dec(data["x"]), _dec(data["y"]))


def _enc(value) -> str:
    return str(value)


def _dec(text):
    value = Fraction(str(text))
    return value.numerator if value.denominator == 1 else value


def _in_sector(a: RingElem, k: int) -> bool:
    # twice the real part and the sign of the imaginary part, exact
    re2 = 2 * a.x - a.ring.u * a.y
    im_sign = a.y
    if k == 2:
        return re2 > 0 or (re2 == 0 and im_sign > 0)
    if k == 4:
        # argument in [0, pi/2): re > 0 and im >= 0
        return re2 > 0 and im_sign >= 0
    if k == 6:
        # argument in [0, pi/3): im >= 0 and im < sqrt(3)*re; with disc -3,
        # im = y*sqrt(3)/2 so the condition reads y < 2x - u*y.
        return im_sign >= 0 and re2 > 0 and a.y < re2
    raise ValueError(f"unexpected unit group of order {k}")


@dataclass(frozen=True)
class Content:
    """Common divisor removed from a matrix; ``partial`` is set when the
    algorithm is not guaranteed complete (non-principal orders)."""

    value: RingElem
    partial: bool = False


def _flatten(matrix):
    for row in matrix:
        yield from row


def content(matrix) -> Content:
    """Content of a nonzero matrix of ring elements.

    Over the integers: the positive gcd of the entries.  Over an order: the
    largest rational integer dividing every coordinate, times tau once more
    when tau divides every quotient entry.
    """
    entries = list(_flatten(matrix))
    if not entries:
        raise ValueError("empty matrix")
    ring = entries[0].ring
    if any(e.ring != ring for e in entries):
        raise ValueError("cannot mix elements of different endomorphism rings")
    if not any(entries):
        raise ValueError("the zero matrix has no content")
    n = 0
    for e in entries:
        n = math.gcd(n, e.x, e.y)
    result = RingElem(ring, n, 0)
    if ring.is_order:
        tau = ring.tau
        if all(tau.divides(e.exact_div(result)) for e in entries):
            result = result * tau
    return Content(result, partial=not ring.is_principal)


def divide_matrix(matrix, divisor: RingElem):
    return [[e.exact_div(divisor) for e in row] for row in matrix]
