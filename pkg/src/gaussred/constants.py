"""Effective-bounds pipeline.

Every explicit bound is computed from declared inputs.  Constants that are
ineffective or conjectural (the Vojta constant, the Bogomolov-type constant
c(g, E, eta), c'', K1..K3) are configuration, each carrying a provenance
string.  Real powers are returned as rational enclosures; discrete steps
(ceilings, minima) escalate precision when an enclosure straddles them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from . import linalg
from .intervals import DEFAULT_BITS, Enclosure, Undecided, emax, emin, power
from .qjson import q, unq

__all__ = [
    "CurveParams",
    "EffectiveBounds",
    "bogomolov_eps",
    "eps1_curve",
    "eps2_curve",
    "prop_em_bounds",
    "tutto_params",
    "prop_a_M",
    "eta0",
    "prop_b_params",
    "equiv_K4",
    "vojta_eps_suite",
    "degree_bounds",
    "helping_curve_matrices",
    "cardinality_bound",
    "ctrao_params",
    "effective_bounds",
    "floor_root",
]

MAX_BITS = 4096


def floor_root(a: int, k: int) -> int:
    """floor(a^(1/k)) for a >= 1."""
    return int(gmpy2.iroot(gmpy2.mpz(a), k)[0])


@dataclass
class CurveParams:
    g: int
    s: int
    deg_C: int
    K0: Fraction
    K1: Fraction
    K2: Fraction
    K3: Fraction
    vojta_c1: Fraction
    bogomolov_c: dict  # eta (Fraction, or None for the default) -> c
    c_double_prime: Fraction
    min_p_norm: Fraction
    max_p_norm: Fraction
    c_p: Fraction
    eps_p: Fraction
    provenance: dict = field(default_factory=dict)
    eps1_override: Fraction | None = None
    eps2_override: Fraction | None = None

    def __post_init__(self):
        if self.g < 2 or self.s < 0 or self.deg_C < 1:
            raise ValueError("need g >= 2, s >= 0, deg C >= 1")
        for name in ("K0", "K1", "K2", "K3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("vojta_c1", "c_double_prime", "min_p_norm", "max_p_norm", "c_p", "eps_p"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if any(c <= 0 for c in self.bogomolov_c.values()):
            raise ValueError("Bogomolov constants must be positive")

    def bogomolov(self, eta) -> Fraction:
        eta = Fraction(eta)
        if eta in self.bogomolov_c:
            return self.bogomolov_c[eta]
        if None in self.bogomolov_c:
            return self.bogomolov_c[None]
        raise KeyError(f"no Bogomolov constant configured for eta = {eta}")

    @classmethod
    def from_json(cls, data: dict) -> "CurveParams":
        raw = data["bogomolov_c"]
        if isinstance(raw, dict):
            bog = {None if k == "default" else unq(k): unq(v) for k, v in raw.items()}
        else:
            bog = {None: unq(raw)}

        def opt(key):
            return unq(data[key]) if data.get(key) is not None else None

        return cls(
            g=int(data["g"]),
            s=int(data["s"]),
            deg_C=int(data["deg_C"]),
            K0=unq(data.get("K0", 0)),
            K1=unq(data["K1"]),
            K2=unq(data["K2"]),
            K3=unq(data.get("K3", 0)),
            vojta_c1=unq(data["vojta_c1"]),
            bogomolov_c=bog,
            c_double_prime=unq(data["c_double_prime"]),
            min_p_norm=unq(data["min_p_norm"]),
            max_p_norm=unq(data["max_p_norm"]),
            c_p=unq(data["c_p"]),
            eps_p=unq(data["eps_p"]),
            provenance=dict(data.get("provenance", {})),
            eps1_override=opt("eps1"),
            eps2_override=opt("eps2"),
        )

    def to_json(self) -> dict:
        bog = {("default" if k is None else q(k)): q(v) for k, v in self.bogomolov_c.items()}
        out = {
            "g": self.g,
            "s": self.s,
            "deg_C": self.deg_C,
            "K0": q(self.K0),
            "K1": q(self.K1),
            "K2": q(self.K2),
            "K3": q(self.K3),
            "vojta_c1": q(self.vojta_c1),
            "bogomolov_c": bog,
            "c_double_prime": q(self.c_double_prime),
            "min_p_norm": q(self.min_p_norm),
            "max_p_norm": q(self.max_p_norm),
            "c_p": q(self.c_p),
            "eps_p": q(self.eps_p),
            "provenance": self.provenance,
        }
        if self.eps1_override is not None:
            out["eps1"] = q(self.eps1_override)
        if self.eps2_override is not None:
            out["eps2"] = q(self.eps2_override)
        return out


def bogomolov_eps(deg: int, cod: int, eta, c, bits: int = DEFAULT_BITS) -> Enclosure:
    """c * deg^(-1/(2 cod) - eta)."""
    if deg < 1 or cod < 1 or Fraction(eta) < 0 or Fraction(c) <= 0:
        raise ValueError("need deg, cod >= 1, eta >= 0, c > 0")
    return Fraction(c) * power(deg, -Fraction(1, 2 * cod) - Fraction(eta), bits)


def eps1_curve(params: CurveParams, eta, bits: int = DEFAULT_BITS, k: int = 1) -> Enclosure:
    """(c / (9 g deg C)^(1/2 + eta))^k; the power is folded into the exponent
    so that exact rational results stay exact."""
    eta = Fraction(eta)
    return params.bogomolov(eta) ** k * power(
        9 * params.g * params.deg_C, -(Fraction(1, 2) + eta) * k, bits
    )


def eps2_curve(params: CurveParams, eta, bits: int = DEFAULT_BITS, k: int = 1) -> Enclosure:
    """(c / (12 g^2 deg C)^(1/(2(g-1)) + eta))^k."""
    eta = Fraction(eta)
    g = params.g
    return params.bogomolov(eta) ** k * power(
        12 * g * g * params.deg_C, -(Fraction(1, 2 * (g - 1)) + eta) * k, bits
    )


def helping_exponent(g: int, s: int) -> int:
    """n = 2(g+s) - 3."""
    return 2 * (g + s) - 3


def prop_em_bounds(params: CurveParams, eta, a: int, bits: int = DEFAULT_BITS):
    """(eps1_bound, eps2_bound, a0) for a pivot a.

    eps1_bound = eps1(C, eta) / a^(1 + 2 eta)
    eps2_bound = eps2(C, eta) * a0^(1/(g-1) - 8(g+s)(g-1) eta), a0 = floor(a^(1/(2n))).
    """
    if a < 1:
        raise ValueError("pivot must be >= 1")
    eta = Fraction(eta)
    g, s = params.g, params.s
    n = helping_exponent(g, s)
    a0 = floor_root(a, 2 * n)
    e1 = eps1_curve(params, eta, bits) / power(a, 1 + 2 * eta, bits)
    e2 = eps2_curve(params, eta, bits) * power(a0, Fraction(1, g - 1) - 8 * (g + s) * (g - 1) * eta, bits)
    return e1, e2, a0


def tutto_params(g: int, s: int, eps4, eps2, K2, bits: int = DEFAULT_BITS):
    """(n, delta1, M', delta) with n = 2(g+s)-3, delta1 = min(eps4, eps2)/(g+s)^2,
    M' = max(2, ceil(K2/delta1)^2)^n and delta = delta1 * M'^(-1 - 1/(2n))."""
    n = helping_exponent(g, s)
    delta1 = emin(eps4, eps2) / ((g + s) ** 2)
    ratio = Enclosure.of(K2) / delta1
    M_prime = max(2, ratio.ceil() ** 2) ** n
    delta = delta1 * power(M_prime, -1 - Fraction(1, 2 * n), bits)
    return n, delta1, M_prime, delta


def prop_a_M(K, eps, n: int) -> int:
    """max(2, ceil(K/eps)^2)^n."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return max(2, math.ceil(Fraction(K) / eps) ** 2) ** n


def eta0(g: int, s: int) -> Fraction:
    """1 / (16 (g+s) (g-1)^2)."""
    return Fraction(1, 16 * (g + s) * (g - 1) ** 2)


def vojta_eps_suite(params: CurveParams):
    """(eps1_remark, eps2_vojta, eps2_prime_remark), all exact.

    eps1_remark = 1 / (2^g c1)
    eps0' = c_p min|p| / (96 (s+1) c1), eps2_vojta = min(eps_p, eps0')
    eps2'_remark = min(1, c_p^2) min|p|^2 / (2^8 g (s+1)^2 max|p| c1)
    """
    g, s, c1 = params.g, params.s, params.vojta_c1
    eps1_remark = 1 / (2**g * c1)
    eps0_prime = params.c_p * params.min_p_norm / (96 * (s + 1) * c1)
    eps2_vojta = min(params.eps_p, eps0_prime)
    eps2_prime = min(Fraction(1), params.c_p**2) * params.min_p_norm**2 / (
        2**8 * g * (s + 1) ** 2 * params.max_p_norm * c1
    )
    return eps1_remark, eps2_vojta, eps2_prime


def eps_bogomolov(params: CurveParams, bits: int = DEFAULT_BITS, k: int = 1) -> Enclosure:
    """eps(C)^k with eps(C) = min(eps1(C, eta0), eps2(C, eta0))."""
    e0 = eta0(params.g, params.s)
    return emin(eps1_curve(params, e0, bits, k), eps2_curve(params, e0, bits, k))


def prop_b_params(params: CurveParams, eta=None, bits: int = DEFAULT_BITS):
    """(eta0, m, eps4).

    m = max(2, (K1/eps2(C, eta))^((g-1)/(1 - 8(g+s)(g-1)^2 eta)))
    eps4 = min(eps1, K1/g, (eps(C)/(g K1))^(8(g+s)g)), eps1 the Vojta-remark value.
    """
    g, s = params.g, params.s
    e0 = eta0(g, s)
    eta = e0 if eta is None else Fraction(eta)
    if eta > e0 or eta < 0:
        raise ValueError(f"eta must lie in [0, eta0 = {e0}]")
    if params.K1 <= 0:
        raise ValueError("K1 must be positive")
    exponent = Fraction(g - 1) / (1 - 8 * (g + s) * (g - 1) ** 2 * eta)
    m = emax(2, power(params.K1 / eps2_curve(params, eta, bits), exponent, bits))
    eps1 = params.eps1_override if params.eps1_override is not None else vojta_eps_suite(params)[0]
    k = 8 * (g + s) * g
    eps4 = emin(eps1, params.K1 / g, eps_bogomolov(params, bits, k) / (g * params.K1) ** k)
    return e0, m, eps4


def equiv_K4(params: CurveParams, eps) -> Fraction:
    """(g+s) * max(1, g (K3 + eps) / (c_p min|p|))."""
    g, s = params.g, params.s
    return (g + s) * max(Fraction(1), g * (params.K3 + Fraction(eps)) / (params.c_p * params.min_p_norm))


def degree_bounds(g: int, a: int, a0: int, deg_C: int):
    """(6 g a^2 deg C, 12 g^2 a0^(2(g-2)) a^(2(g-1)) deg C)."""
    if a < 1 or a0 < 1:
        raise ValueError("a and a0 must be >= 1")
    return 6 * g * a * a * deg_C, 12 * g * g * a0 ** (2 * (g - 2)) * a ** (2 * (g - 1)) * deg_C


@dataclass(frozen=True)
class HelpingCurveMatrices:
    a0: int
    a: int
    sigma: tuple[int, ...]
    Phi: list
    A: list
    A0: list
    L: list

    def identity_holds(self) -> bool:
        """Phi == a0 * a * A0^-1 * L * A^-1 over the rationals."""
        rhs = linalg.matmul(linalg.matmul(linalg.inverse(self.A0), self.L), linalg.inverse(self.A))
        scale = self.a0 * self.a
        return all(
            Fraction(self.Phi[i][j]) == scale * rhs[i][j]
            for i in range(len(self.Phi))
            for j in range(len(self.Phi))
        )


def helping_curve_matrices(form, n: int) -> HelpingCurveMatrices:
    """Isogenies around the helping curve for a rank-2 Gauss-reduced integer form.

    In the standard column order (a I_2 | L):
    Phi = rows a0*phi then e_3..e_g, A = diag(1, 1, a, ..., a),
    A0 = diag(1, 1, a0, ..., a0), Lmap = [[I_2, L], [0, I]].
    """
    phi = form.standard
    if phi.r != 2:
        raise ValueError("helping curve matrices need rank 2")
    if phi.ring.is_order:
        raise ValueError("helping curve matrices need integer entries")
    rows = phi.to_ints()
    a = form.a.x
    g = phi.g
    a0 = floor_root(a, 2 * n)
    Phi = [[a0 * x for x in rows[0]], [a0 * x for x in rows[1]]]
    Phi += [[1 if j == i else 0 for j in range(g)] for i in range(2, g)]
    A = [[(1 if i < 2 else a) if i == j else 0 for j in range(g)] for i in range(g)]
    A0 = [[(1 if i < 2 else a0) if i == j else 0 for j in range(g)] for i in range(g)]
    Lmap = [[1 if i == j else 0 for j in range(g)] for i in range(g)]
    for i in range(2):
        for j in range(2, g):
            Lmap[i][j] = rows[i][j]
    out = HelpingCurveMatrices(a0, a, form.sigma, Phi, A, A0, Lmap)
    if not out.identity_holds():
        raise AssertionError("helping curve identity failed")
    return out


def cardinality_bound(params: CurveParams, M: int):
    """(Theta(C) = c'' deg C^g, (3g)^(2g+1) M^(2g+3) Theta(C))."""
    if M < 1:
        raise ValueError("M must be >= 1")
    g = params.g
    theta = params.c_double_prime * params.deg_C**g
    return theta, (3 * g) ** (2 * g + 1) * M ** (2 * g + 3) * theta


def ctrao_params(params: CurveParams, eps_C=None, bits: int = DEFAULT_BITS):
    """(delta1, M, eps) for the transverse case.

    delta1 = (1/g) min(1, K0/g, (eps(C)/(g K0))^(8 g^2))
    M = max(2, ceil(K0/delta1)^2)^(2g-3)
    eps = g^(-4g) min(1, 1/K0)^(4g) min(1, K0, (eps(C)/(g K0))^(8 g^2))^(4g)
    """
    g, K0 = params.g, params.K0
    if K0 <= 0:
        raise ValueError("K0 must be positive")
    k = 8 * g * g
    epsC_k = eps_bogomolov(params, bits, k) if eps_C is None else Enclosure.of(eps_C).ipow(k)
    t = epsC_k / (g * K0) ** k
    delta1 = emin(1, K0 / g, t) / g
    M = max(2, (Enclosure.of(K0) / delta1).ceil() ** 2) ** (2 * g - 3)
    eps = Fraction(1, g ** (4 * g)) * min(Fraction(1), 1 / K0) ** (4 * g) * emin(1, K0, t).ipow(4 * g)
    return delta1, M, eps


@dataclass
class EffectiveBounds:
    values: dict
    formulas: dict
    bits: int

    def to_json(self) -> dict:
        out = {}
        for key, value in self.values.items():
            if isinstance(value, Enclosure):
                enc = value.to_json()
            elif isinstance(value, int):
                enc = str(value)
            else:
                enc = q(value)
            out[key] = {"value": enc, "formula": self.formulas[key]}
        return {"bits": self.bits, "bounds": out}

    def check(self) -> list[str]:
        fails = []
        v = self.values
        for key, value in v.items():
            lo = value.lo if isinstance(value, Enclosure) else Fraction(value)
            if lo < 0:
                fails.append(f"{key} is negative")
        delta, delta1, eps4 = (Enclosure.of(v[k]) for k in ("delta", "delta1", "eps4"))
        if delta.le(delta1) is False or delta1.le(eps4) is False:
            fails.append("ordering delta <= delta1 <= eps4 violated")
        return fails


FORMULAS = {
    "n": "2(g+s) - 3",
    "eta0": "1/(16 (g+s) (g-1)^2)",
    "eps1_C_eta": "c(eta0) / (9 g degC)^(1/2 + eta0)",
    "eps2_C_eta": "c(eta0) / (12 g^2 degC)^(1/(2(g-1)) + eta0)",
    "eps_bogomolov": "min(eps1_C_eta, eps2_C_eta)",
    "m": "max(2, (K1/eps2_C_eta)^((g-1)/(1 - 8(g+s)(g-1)^2 eta0)))",
    "eps1_remark": "1/(2^g c1_vojta)",
    "eps2_vojta": "min(eps_p, c_p min|p| / (96 (s+1) c1_vojta))",
    "eps2_prime_remark": "min(1, c_p^2) min|p|^2 / (2^8 g (s+1)^2 max|p| c1_vojta)",
    "eps4": "min(eps1, K1/g, (eps_bogomolov/(g K1))^(8 (g+s) g))",
    "M": "max(2, ceil(K1/eps4)^2)^n",
    "delta1": "min(eps4, eps2_vojta)/(g+s)^2",
    "M_prime": "max(2, ceil(K2/delta1)^2)^n",
    "delta": "delta1 * M_prime^(-1 - 1/(2n))",
    "K4": "(g+s) max(1, g (K3 + eps_p) / (c_p min|p|))",
    "theta_C": "c'' degC^g",
    "cardinality_cap": "(3g)^(2g+1) M_prime^(2g+3) theta_C",
    "ctrao_delta1": "(1/g) min(1, K0/g, (eps_bogomolov/(g K0))^(8 g^2))",
    "ctrao_M": "max(2, ceil(K0/ctrao_delta1)^2)^(2g-3)",
    "ctrao_eps": "g^(-4g) min(1, 1/K0)^(4g) min(1, K0, (eps_bogomolov/(g K0))^(8 g^2))^(4g)",
}


def _bounds_at(params: CurveParams, bits: int) -> dict:
    g, s = params.g, params.s
    e0 = eta0(g, s)
    eps1_remark, eps2_vojta, eps2_prime = vojta_eps_suite(params)
    eps2 = params.eps2_override if params.eps2_override is not None else eps2_vojta
    _, m, eps4 = prop_b_params(params, e0, bits)
    n, delta1, M_prime, delta = tutto_params(g, s, eps4, eps2, params.K2, bits)
    theta, cap = cardinality_bound(params, M_prime)
    v = {
        "n": n,
        "eta0": e0,
        "eps1_C_eta": eps1_curve(params, e0, bits),
        "eps2_C_eta": eps2_curve(params, e0, bits),
        "eps_bogomolov": eps_bogomolov(params, bits),
        "m": m,
        "eps1_remark": eps1_remark,
        "eps2_vojta": eps2,
        "eps2_prime_remark": eps2_prime,
        "eps4": eps4,
        "M": max(2, (Enclosure.of(params.K1) / eps4).ceil() ** 2) ** n,
        "delta1": delta1,
        "M_prime": M_prime,
        "delta": delta,
        "K4": equiv_K4(params, params.eps_p),
        "theta_C": theta,
        "cardinality_cap": cap,
    }
    if params.K0 > 0:
        cd1, cM, ceps = ctrao_params(params, bits=bits)
        v.update(ctrao_delta1=cd1, ctrao_M=cM, ctrao_eps=ceps)
    return v


def effective_bounds(params: CurveParams, bits: int = DEFAULT_BITS) -> EffectiveBounds:
    """The full report, escalating precision until every discrete step is decided."""
    while True:
        try:
            values = _bounds_at(params, bits)
            break
        except Undecided:
            if bits >= MAX_BITS:
                raise
            bits *= 2
    return EffectiveBounds(values, {k: FORMULAS[k] for k in values}, bits)
