"""Simultaneous Dirichlet approximation and approximation of Gauss-reduced
integer morphisms by morphisms of smaller pivot, with exact certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .endring import ZZ
from .morphism import GaussReducedForm, Morphism, as_gauss_form, is_gauss_reduced
from .qjson import q, unq, unq_int

__all__ = ["dirichlet_approx", "approx_gauss_reduced", "ApproxCertificate", "approx_exponent"]


def dirichlet_approx(alpha, Q: int):
    """Smallest f in [1, Q^n) with |alpha_i f - f_i| <= 1/Q for every i.

    Returns (f, f_vec) with f_i the nearest integer to alpha_i f.
    """
    alpha = [Fraction(a) for a in alpha]
    if not alpha:
        raise ValueError("need at least one number")
    if Q < 2:
        raise ValueError("Q must be at least 2")
    n = len(alpha)
    den = math.lcm(*(a.denominator for a in alpha))
    nums = [a.numerator * (den // a.denominator) for a in alpha]
    for f in range(1, Q**n):
        fv = [(2 * p * f + den) // (2 * den) for p in nums]
        # |p f / den - fi| <= 1/Q  <=>  Q |p f - den fi| <= den
        if all(Q * abs(p * f - den * fi) <= den for p, fi in zip(nums, fv)):
            return f, fv
    raise AssertionError("no approximation found below Q^n")  # pragma: no cover


def approx_exponent(r: int, g: int) -> int:
    """n = rg - r^2 + 1, the number of entries approximated plus one."""
    return r * g - r * r + 1


@dataclass(frozen=True)
class ApproxCertificate:
    """psi = (f I_r | L') approximating phi = (a I_r | L) in standard column order.

    ``lhs`` is max |psi/f - phi/a|^2.  The target bound
    Q^(-1) f^(-2-1/n) is irrational in general, so it is certified through
    its n-th power: lhs^n * Q^n * f^(2n+1) <= 1.
    """

    Q: int
    n: int
    f: int
    phi: Morphism
    a: int
    sigma: tuple[int, ...]
    psi: Morphism
    lhs: Fraction
    passthrough: bool

    @property
    def rhs_pow_n(self) -> Fraction:
        return Fraction(1, self.Q**self.n * self.f ** (2 * self.n + 1))

    @property
    def rhs_float(self) -> float:
        return self.Q**-1 * self.f ** (-2 - 1 / self.n)

    @property
    def strong_bound(self) -> Fraction:
        """1/(Qf)^2, which the box principle gives directly."""
        return Fraction(1, (self.Q * self.f) ** 2)

    def check(self) -> list[str]:
        fails = []
        r, g = self.phi.r, self.phi.g
        if self.Q < 2:
            fails.append("Q < 2")
        if self.n != approx_exponent(r, g):
            fails.append("n != rg - r^2 + 1")
        if not 1 <= self.f <= self.Q**self.n:
            fails.append("f outside [1, Q^n]")
        if sorted(self.sigma) != list(range(g)):
            fails.append("sigma is not a permutation")
            return fails
        std_phi = self.phi.permuted(self.sigma).to_ints()
        std_psi = self.psi.permuted(self.sigma).to_ints()
        for i in range(r):
            for k in range(r):
                if std_phi[i][k] != (self.a if i == k else 0):
                    fails.append("phi is not (a I_r | L) under sigma")
                    break
                if std_psi[i][k] != (self.f if i == k else 0):
                    fails.append("psi is not (f I_r | L') under sigma")
                    break
        chk = is_gauss_reduced(self.psi)
        if not chk:
            fails.append(f"psi not Gauss-reduced: {chk.diagnosis}")
        if self.passthrough and (self.psi != self.phi or self.f != self.a):
            fails.append("pass-through certificate must keep phi")
        if self.passthrough and self.a > self.Q**self.n:
            fails.append("pass-through used with a > Q^n")
        lhs = _error_sq(std_phi, self.a, std_psi, self.f)
        if lhs != self.lhs:
            fails.append("lhs does not match the recomputed error")
        if lhs**self.n * self.Q**self.n * self.f ** (2 * self.n + 1) > 1:
            fails.append("squared approximation inequality violated")
        return fails

    def to_json(self) -> dict:
        return {
            "type": "approx",
            "Q": self.Q,
            "n": self.n,
            "f": str(self.f),
            "a": str(self.a),
            "sigma": list(self.sigma),
            "phi": self.phi.to_json(),
            "psi": self.psi.to_json(),
            "lhs": q(self.lhs),
            "rhs_pow_n": q(self.rhs_pow_n),
            "passthrough": self.passthrough,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ApproxCertificate":
        return cls(
            Q=unq_int(data["Q"]),
            n=unq_int(data["n"]),
            f=unq_int(data["f"]),
            phi=Morphism.from_json(data["phi"]),
            a=unq_int(data["a"]),
            sigma=tuple(int(i) for i in data["sigma"]),
            psi=Morphism.from_json(data["psi"]),
            lhs=unq(data["lhs"]),
            passthrough=bool(data["passthrough"]),
        )


def _error_sq(std_phi, a, std_psi, f) -> Fraction:
    return max(
        (Fraction(p, f) - Fraction(x, a)) ** 2
        for row_phi, row_psi in zip(std_phi, std_psi)
        for x, p in zip(row_phi, row_psi)
    )


def _unpermute(rows, sigma):
    g = len(sigma)
    out = [[0] * g for _ in rows]
    for k, j in enumerate(sigma):
        for i, row in enumerate(rows):
            out[i][j] = row[k]
    return out


def approx_gauss_reduced(phi, Q: int) -> ApproxCertificate:
    """Approximate a Gauss-reduced integer morphism by psi = (f I_r | L') with f <= Q^n.

    ``phi`` may be a GaussReducedForm or a Gauss-reduced Morphism.
    """
    if isinstance(phi, GaussReducedForm):
        form = phi
    else:
        if not is_gauss_reduced(phi):
            raise ValueError("input is not Gauss-reduced")
        form = as_gauss_form(phi)
    if form.phi.ring != ZZ:
        raise ValueError("approximation is only defined over the integers; flatten C.M. inputs first")
    phi_m, sigma, a = form.phi, form.sigma, form.a.x
    r, g = phi_m.r, phi_m.g
    n = approx_exponent(r, g)
    if a <= Q**n:
        return ApproxCertificate(Q, n, a, phi_m, a, sigma, phi_m, Fraction(0), True)
    std = phi_m.permuted(sigma).to_ints()
    L = [row[r:] for row in std]
    alpha = [Fraction(1)] + [Fraction(x, a) for row in L for x in row]
    f, fv = dirichlet_approx(alpha, Q)
    assert fv[0] == f, "first coordinate must reproduce f"
    d = math.gcd(f, *fv)
    f, fv = f // d, [x // d for x in fv]
    assert all(abs(x) <= f for x in fv), "approximating entries exceed f"
    it = iter(fv[1:])
    std_psi = [[f if i == k else 0 for k in range(r)] + [next(it) for _ in range(g - r)] for i in range(r)]
    psi = Morphism(ZZ, _unpermute(std_psi, sigma))
    chk = is_gauss_reduced(psi)
    assert chk, f"approximation is not Gauss-reduced: {chk.diagnosis}"
    lhs = _error_sq(std, a, std_psi, f)
    cert = ApproxCertificate(Q, n, f, phi_m, a, sigma, psi, lhs, False)
    assert not cert.check(), cert.check()
    return cert
