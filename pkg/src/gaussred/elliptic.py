"""Elliptic curves over Q: exact group law, canonical heights, height-pairing Gram.

Heights follow the normalization with h((0,0)) ~ 0.0511114 on
y^2 + y = x^3 - x, i.e. lim log H(x(2^N P)) / 4^N.

The enclosure comes from the doubling limit.  With h_x(Q) = log H(x(Q)),
every step satisfies  -lower <= h_x(2Q) - 4 h_x(Q) <= upper  where
``upper`` is the log of the larger coefficient sum of the duplication
polynomials and ``lower`` comes from an exact Bezout identity with their
resultant.  Telescoping gives

    lim h_x(2^k P)/4^k  in  h_x(2^N P)/4^N + [-lower, upper] / (3 * 4^N).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath

from . import linalg
from .endring import ZZ
from .intervals import Enclosure
from .mwlattice import MWModel
from .qjson import q, unq

__all__ = [
    "WeierstrassCurve",
    "RatPoint",
    "INF",
    "canonical_height",
    "height_pairing_gram",
    "HeightGram",
    "torsion_order",
    "PrecisionUnreachable",
]

MAZUR_MAX_ORDER = 12


class PrecisionUnreachable(ArithmeticError):
    pass


@dataclass(frozen=True)
class RatPoint:
    x: Fraction | None = None
    y: Fraction | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_json(self):
        return "inf" if self.is_infinity else [q(self.x), q(self.y)]

    @classmethod
    def from_json(cls, data) -> "RatPoint":
        if data == "inf" or data is None:
            return INF
        return cls(unq(data[0]), unq(data[1]))

    def __repr__(self):
        return "RatPoint(inf)" if self.is_infinity else f"RatPoint({self.x}, {self.y})"


INF = RatPoint()


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: Fraction = Fraction(0)
    a2: Fraction = Fraction(0)
    a3: Fraction = Fraction(0)
    a4: Fraction = Fraction(0)
    a6: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.discriminant == 0:
            raise ValueError("singular curve")

    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def to_json(self) -> dict:
        return {"a": [q(self.a1), q(self.a2), q(self.a3), q(self.a4), q(self.a6)]}

    @classmethod
    def from_json(cls, data) -> "WeierstrassCurve":
        coeffs = data["a"] if isinstance(data, dict) else data
        if len(coeffs) != 5:
            raise ValueError("need [a1, a2, a3, a4, a6]")
        return cls(*(unq(c) for c in coeffs))

    # group law
    def contains(self, P: RatPoint) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        return y * y + self.a1 * x * y + self.a3 * y == x**3 + self.a2 * x * x + self.a4 * x + self.a6

    def point(self, x, y) -> RatPoint:
        P = RatPoint(Fraction(x), Fraction(y))
        if not self.contains(P):
            raise ValueError(f"({x}, {y}) is not on the curve")
        return P

    def _check(self, *points):
        for P in points:
            if not self.contains(P):
                raise ValueError(f"{P} is not on the curve")

    def neg(self, P: RatPoint) -> RatPoint:
        self._check(P)
        if P.is_infinity:
            return P
        return RatPoint(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: RatPoint, Q: RatPoint) -> RatPoint:
        self._check(P, Q)
        return self._add(P, Q)

    def _add(self, P, Q):
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        a1, a2, a3, a4 = self.a1, self.a2, self.a3, self.a4
        if P.x == Q.x:
            if P.y + Q.y + a1 * Q.x + a3 == 0:
                return INF
            lam = (3 * P.x**2 + 2 * a2 * P.x + a4 - a1 * P.y) / (2 * P.y + a1 * P.x + a3)
        else:
            lam = (Q.y - P.y) / (Q.x - P.x)
        nu = P.y - lam * P.x
        x3 = lam * lam + a1 * lam - a2 - P.x - Q.x
        y3 = -(lam + a1) * x3 - nu - a3
        return RatPoint(x3, y3)

    def double(self, P: RatPoint) -> RatPoint:
        return self.add(P, P)

    def sub(self, P: RatPoint, Q: RatPoint) -> RatPoint:
        return self.add(P, self.neg(Q))

    def scalar(self, k: int, P: RatPoint) -> RatPoint:
        self._check(P)
        if k < 0:
            return self.scalar(-k, self.neg(P))
        result, base = INF, P
        while k:
            if k & 1:
                result = self._add(result, base)
            base = self._add(base, base)
            k >>= 1
        return result

    # duplication on x = X/Z
    def _duplication(self):
        """Integer forms (Phi, Psi) of degree 4 with x(2Q) = Phi(X, Z) / Psi(X, Z).

        Coefficients are listed by descending power of X.
        """
        b2, b4, b6, b8 = self.b_invariants
        phi = [Fraction(1), Fraction(0), -b4, -2 * b6, -b8]
        psi = [Fraction(0), Fraction(4), b2, 2 * b4, b6]
        den = math.lcm(*(c.denominator for c in phi + psi))
        return [int(c * den) for c in phi], [int(c * den) for c in psi]


def _eval_form(coeffs, X, Z):
    """Homogeneous form with coefficients by descending power of X."""
    deg = len(coeffs) - 1
    xpow, zpow = [gmpy2.mpz(1)], [gmpy2.mpz(1)]
    for _ in range(deg):
        xpow.append(xpow[-1] * X)
        zpow.append(zpow[-1] * Z)
    out = gmpy2.mpz(0)
    for i, c in enumerate(coeffs):
        if c:
            out += c * xpow[deg - i] * zpow[i]
    return out


def _bezout_constant(phi, psi) -> Fraction:
    """L with max(|X|,|Z|)^4 <= L * max(|Phi|,|Psi|) / gcd(Phi, Psi) for coprime X, Z.

    Solves f Phi + g Psi = R1 X^7 and f' Phi + g' Psi = R2 Z^7 with integral
    cubic forms.  The gcd divides lcm(R1, R2), and each identity bounds one
    of |X|^4, |Z|^4 by (coefficient sum / R) * max(|Phi|, |Psi|).
    """
    def solve(target):
        # unknowns: f, g (4 coefficients each); equations: monomials X^7..Z^7
        rows = [[Fraction(0)] * 8 for _ in range(8)]
        for j in range(4):
            for i, c in enumerate(phi):
                rows[i + j][j] += c
            for i, c in enumerate(psi):
                rows[i + j][4 + j] += c
        rhs = [Fraction(1 if k == target else 0) for k in range(8)]
        sol = linalg.solve(rows, rhs)
        den = math.lcm(*(c.denominator for c in sol))
        return sum(abs(int(c * den)) for c in sol), den

    (s1, R1), (s2, R2) = solve(0), solve(7)
    R = math.lcm(R1, R2)
    return R * max(Fraction(s1, R1), Fraction(s2, R2)), R


def _log_enclosure(n) -> Enclosure:
    """Rigorous enclosure of log(n) for a positive integer n."""
    n = int(n)
    if n <= 0:
        raise ValueError("log of a nonpositive integer")
    shift = max(0, n.bit_length() - 64)
    m = n >> shift
    hi_m = m + (1 if (m << shift) != n else 0)
    with mpmath.workprec(96):
        iv = mpmath.iv
        val = iv.log(iv.mpf([m, hi_m])) + shift * iv.log(2)
        return Enclosure(_mpf_to_fraction(val.a), _mpf_to_fraction(val.b))


def _mpf_to_fraction(x) -> Fraction:
    m = mpmath.mpf(x)
    man, exp = m.man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


def _naive_x(P: RatPoint):
    return gmpy2.mpz(P.x.numerator), gmpy2.mpz(P.x.denominator)


def torsion_order(curve: WeierstrassCurve, P: RatPoint) -> int | None:
    """Order of P if it is torsion (at most 12 over Q by Mazur's bound), else None."""
    Q = P
    for k in range(1, MAZUR_MAX_ORDER + 1):
        if Q.is_infinity:
            return k
        Q = curve._add(Q, P)
    return None


@dataclass(frozen=True)
class HeightConstants:
    upper: Enclosure  # log of the coefficient-sum bound
    lower: Enclosure  # log of the Bezout constant
    gcd_modulus: int  # gcd(Phi, Psi) always divides this

    @classmethod
    def for_curve(cls, curve: WeierstrassCurve) -> "HeightConstants":
        phi, psi = curve._duplication()
        up = max(sum(abs(c) for c in phi), sum(abs(c) for c in psi))
        low, modulus = _bezout_constant(phi, psi)
        return cls(_log_enclosure(up), _log_of_fraction(low), modulus)


def _log_of_fraction(x: Fraction) -> Enclosure:
    return _log_enclosure(x.numerator) - _log_enclosure(x.denominator)


_CONSTANTS: dict = {}


def height_constants(curve: WeierstrassCurve) -> HeightConstants:
    if curve not in _CONSTANTS:
        _CONSTANTS[curve] = HeightConstants.for_curve(curve)
    return _CONSTANTS[curve]


def canonical_height(curve: WeierstrassCurve, P: RatPoint, precision=Fraction(1, 10**6), *, max_doublings: int = 18) -> Enclosure:
    """Enclosure of the canonical height of P with width at most ``precision``."""
    curve._check(P)
    precision = Fraction(precision)
    if torsion_order(curve, P) is not None:
        return Enclosure.exact(0)
    consts = height_constants(curve)
    spread = consts.upper.hi + max(consts.lower.hi, Fraction(0))
    phi, psi = curve._duplication()
    X, Z = _naive_x(P)
    N = 0
    while True:
        # width after N doublings: spread / (3 * 4^N) plus log rounding
        if spread / (3 * 4**N) <= precision / 2:
            break
        if N >= max_doublings:
            raise PrecisionUnreachable(f"precision {precision} needs more than {max_doublings} doublings")
        X, Z = _eval_form(phi, X, Z), _eval_form(psi, X, Z)
        R = consts.gcd_modulus
        d = gmpy2.gcd(gmpy2.gcd(R, X % R), Z % R)
        X, Z = X // d, Z // d
        if Z < 0:
            X, Z = -X, -Z
        N += 1
    h = _log_enclosure(max(abs(X), abs(Z)))
    scale = Fraction(1, 4**N)
    lo = h.lo * scale - max(consts.lower.hi, Fraction(0)) * scale / 3
    hi = h.hi * scale + consts.upper.hi * scale / 3
    lo = max(lo, Fraction(0))
    # round endpoints outward to keep the rationals small
    den = 1 << 80
    lo = Fraction(math.floor(lo * den), den)
    hi = Fraction(math.ceil(hi * den), den)
    if hi - lo > precision:
        raise PrecisionUnreachable("rounding exceeded the requested precision")
    return Enclosure(lo, hi)


@dataclass
class HeightGram:
    curve: WeierstrassCurve
    points: list
    gram: list  # s x s Enclosures
    precision: Fraction

    @property
    def midpoint(self):
        return [[e.mid for e in row] for row in self.gram]

    @property
    def radius(self) -> Fraction:
        return max(e.width / 2 for row in self.gram for e in row)

    def to_model(self, gamma0=None) -> MWModel:
        s = len(self.points)
        meta = {"gram_radius": q(self.radius), "curve": self.curve.to_json(), "points": [p.to_json() for p in self.points]}
        return MWModel(ZZ, self.midpoint, tuple(range(s)) if gamma0 is None else tuple(gamma0), metadata=meta)

    def to_json(self) -> dict:
        return {
            "type": "heights",
            "curve": self.curve.to_json(),
            "points": [p.to_json() for p in self.points],
            "precision": q(self.precision),
            "gram": [[e.to_json() for e in row] for row in self.gram],
        }


def height_pairing_gram(curve: WeierstrassCurve, points, precision=Fraction(1, 10**6)) -> HeightGram:
    """Gram matrix of <P, Q> = (h(P+Q) - h(P) - h(Q)) / 2 as enclosures."""
    precision = Fraction(precision)
    # each pairing combines three heights, so ask for a third of the width
    eps = precision / 3
    pts = list(points)
    for P in pts:
        curve._check(P)
    diag = [canonical_height(curve, P, eps) for P in pts]
    s = len(pts)
    gram = [[None] * s for _ in range(s)]
    for i in range(s):
        gram[i][i] = diag[i]
        for j in range(i + 1, s):
            hs = canonical_height(curve, curve._add(pts[i], pts[j]), eps)
            e = (hs - diag[i] - diag[j]) * Fraction(1, 2)
            gram[i][j] = gram[j][i] = e
    return HeightGram(curve, pts, gram, precision)
