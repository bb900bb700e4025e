"""Replays of the set inclusions on lattice models, each with an exact certificate.

Points of E^g are lists of g coordinate vectors over an ``MWModel``.  The
radius bounds here use the per-coordinate (max) norm, the same convention
as the bounds they check.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .constants import equiv_K4, prop_a_M
from .dirichlet import approx_exponent, approx_gauss_reduced
from .endring import ZZ, RingElem, content
from .morphism import (
    act,
    GaussReducedForm,
    Morphism,
    apply_matrix,
    as_gauss_form,
    classify,
    height,
    is_gauss_reduced,
    max_minor,
)
from .mwlattice import (
    MWModel,
    QuasiOrthonormalBasis,
    in_span,
    max_norm_sq,
    min_norm_preimage,
)
from .qjson import q, qmat, unq, unq_int, unqmat

__all__ = [
    "CoverCertificate",
    "PreconditionError",
    "simulate_prop_a",
    "plant_prop_a",
    "SpecialInjection",
    "special_injection",
    "plant_special",
    "represent_in_basis",
    "equiv_embed_i",
    "QuasiSpecial",
    "quasi_special_reduce",
    "ReverseEmbedding",
    "equiv_reverse",
    "plant_reverse",
    "radius_holds",
]


def _add(p, q_):
    return [[a + b for a, b in zip(u, v)] for u, v in zip(p, q_)]


def _sub(p, q_):
    return [[a - b for a, b in zip(u, v)] for u, v in zip(p, q_)]


def _scale(c, p):
    return [[c * a for a in u] for u in p]


def _zeros(g, d):
    return [[Fraction(0)] * d for _ in range(g)]


def _frac_point(p):
    return [[Fraction(c) for c in u] for u in p]


def _place(rows, sigma, g, d):
    """Point of E^g carrying rows[i] at coordinate sigma[i] and 0 elsewhere."""
    out = _zeros(g, d)
    for i, row in enumerate(rows):
        out[sigma[i]] = [Fraction(c) for c in row]
    return out


def radius_holds(norm_sq: Fraction, g: int, eps: Fraction, f: int, n: int) -> bool:
    """sqrt(norm_sq) <= g eps / f^(1 + 1/(2n)), decided exactly via n-th powers."""
    return norm_sq**n * f ** (2 * n + 1) <= (g * g * eps * eps) ** n


def small_ball_holds(norm_sq: Fraction, eps: Fraction, M: int, n: int) -> bool:
    """sqrt(norm_sq) <= eps / M^(1 + 1/(2n))."""
    return norm_sq**n * M ** (2 * n + 1) <= (eps * eps) ** n


@dataclass
class CoverCertificate:
    """Witness that x lies in B_psi + Gamma_0^g + O_rho with H(psi) <= M and
    rho = g eps / f^(1 + 1/(2n)):  psi(x - y' - xi') = 0."""

    model: MWModel
    phi: Morphism
    psi: Morphism
    sigma: tuple[int, ...]
    a: int
    f: int
    Q: int
    n: int
    M: int
    eps: Fraction
    K1: Fraction
    x: list
    y_prime: list
    xi_prime: list
    passthrough: bool
    preconditions: dict = field(default_factory=dict)
    witness_y: list | None = None
    witness_xi: list | None = None

    @property
    def xi_prime_norm_sq(self) -> Fraction:
        return max_norm_sq(self.model, self.xi_prime)

    def check(self) -> list[str]:
        fails = []
        g = self.phi.g
        if self.Q != max(2, math.ceil(self.K1 / self.eps) ** 2):
            fails.append("Q differs from max(2, ceil(K1/eps)^2)")
        if self.n != approx_exponent(self.phi.r, g):
            fails.append("n differs from rg - r^2 + 1")
        if self.M != prop_a_M(self.K1, self.eps, self.n):
            fails.append("M differs from max(2, ceil(K1/eps)^2)^n")
        chk_phi = is_gauss_reduced(self.phi)
        if not chk_phi or chk_phi.pivot.x != self.a:
            fails.append("a is not the pivot of phi")
        elif as_gauss_form(self.phi).sigma != tuple(self.sigma):
            fails.append("sigma is not the pivot layout of phi")
        if self.passthrough != (self.a <= self.M):
            fails.append("pass-through flag inconsistent with a <= M")
        if height(self.psi) > self.M**2:
            fails.append("H(psi) > M")
        chk = is_gauss_reduced(self.psi)
        if not chk:
            fails.append(f"psi not Gauss-reduced: {chk.diagnosis}")
        elif chk.pivot.x != self.f:
            fails.append("pivot of psi differs from f")
        residual = apply_matrix(self.psi, _sub(_sub(self.x, self.y_prime), self.xi_prime))
        if any(c for row in residual for c in row):
            fails.append("psi(x - y' - xi') != 0")
        if not in_span(self.model, self.y_prime, self.model.gamma0):
            fails.append("y' not in Gamma_0^g")
        if not radius_holds(self.xi_prime_norm_sq, g, self.eps, self.f, self.n):
            fails.append("|xi'| exceeds g eps / f^(1+1/(2n))")
        return fails

    def to_json(self) -> dict:
        return {
            "type": "cover",
            "model": self.model.to_json(),
            "phi": self.phi.to_json(),
            "psi": self.psi.to_json(),
            "sigma": list(self.sigma),
            "a": str(self.a),
            "f": str(self.f),
            "Q": str(self.Q),
            "n": self.n,
            "M": str(self.M),
            "eps": q(self.eps),
            "K1": q(self.K1),
            "x": qmat(self.x),
            "y_prime": qmat(self.y_prime),
            "xi_prime": qmat(self.xi_prime),
            "xi_prime_norm_sq": q(self.xi_prime_norm_sq),
            "passthrough": self.passthrough,
            "preconditions": self.preconditions,
            "witness": {"y": qmat(self.witness_y), "xi": qmat(self.witness_xi)} if self.witness_y is not None else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoverCertificate":
        witness = data.get("witness") or {}
        return cls(
            model=MWModel.from_json(data["model"]),
            phi=Morphism.from_json(data["phi"]),
            psi=Morphism.from_json(data["psi"]),
            sigma=tuple(int(i) for i in data["sigma"]),
            a=unq_int(data["a"]),
            f=unq_int(data["f"]),
            Q=unq_int(data["Q"]),
            n=unq_int(data["n"]),
            M=unq_int(data["M"]),
            eps=unq(data["eps"]),
            K1=unq(data["K1"]),
            x=unqmat(data["x"]),
            y_prime=unqmat(data["y_prime"]),
            xi_prime=unqmat(data["xi_prime"]),
            passthrough=bool(data["passthrough"]),
            preconditions=dict(data.get("preconditions", {})),
            witness_y=unqmat(witness["y"]) if "y" in witness else None,
            witness_xi=unqmat(witness["xi"]) if "xi" in witness else None,
        )


class PreconditionError(ValueError):
    """The inputs fall outside the hypotheses of the simulated statement."""


def simulate_prop_a(model: MWModel, phi, x, y, xi, eps, K1) -> CoverCertificate:
    """Replay the bounded-height cover for x = (kernel part) + y + xi.

    The witness (y, xi) must satisfy phi(x - y - xi) = 0, y in Gamma_0^g and
    |xi| <= eps / M^(1 + 1/(2n)).  Returns the certificate for the
    approximating psi with H(psi) <= M.
    """
    if model.ring != ZZ:
        raise ValueError("flatten C.M. morphisms with cm_flatten first")
    form = phi if isinstance(phi, GaussReducedForm) else as_gauss_form(phi)
    phi_m = form.phi
    g, r = phi_m.g, phi_m.r
    if r < 2:
        raise PreconditionError("the cover statement needs r >= 2")
    eps, K1 = Fraction(eps), Fraction(K1)
    x, y, xi = _frac_point(x), _frac_point(y), _frac_point(xi)
    Q = max(2, math.ceil(K1 / eps) ** 2)
    n = approx_exponent(r, g)
    M = Q**n
    pre = {
        "witness_kernel": not any(c for row in apply_matrix(phi_m, _sub(_sub(x, y), xi)) for c in row),
        "y_in_gamma0": in_span(model, y, model.gamma0),
        "xi_small": small_ball_holds(max_norm_sq(model, xi), eps, M, n),
        "x_norm_le_K1": max_norm_sq(model, x) <= K1 * K1,
    }
    # least-norm representative over the coset of ker(phi) + Gamma_0^g
    best = min_norm_preimage(model, phi_m, apply_matrix(phi_m, x), coset_gamma0=True)
    pre["membership_least_norm"] = small_ball_holds(best.norm_sq / g, eps, M, n)
    if not all(pre.values()):
        bad = [k for k, v in pre.items() if not v]
        raise PreconditionError(f"preconditions violated: {bad}")
    cert = approx_gauss_reduced(form, Q)
    psi, f, sigma, a = cert.psi, cert.f, form.sigma, form.a.x
    d = model.dim
    if cert.passthrough:
        y_prime, xi_prime = y, xi
    else:
        y2 = [[c / a for c in row] for row in apply_matrix(phi_m, y)]
        y_prime = _place(y2, sigma, g, d)
        xi2 = [[c / f for c in row] for row in apply_matrix(psi, _sub(x, y_prime))]
        xi_prime = _place(xi2, sigma, g, d)
    out = CoverCertificate(
        model, phi_m, psi, sigma, a, f, Q, n, M, eps, K1, x, y_prime, xi_prime, cert.passthrough, pre, y, xi
    )
    fails = out.check()
    if fails:
        raise AssertionError(f"cover certificate failed: {fails}")
    return out


def _random_point(rng: random.Random, g: int, d: int, bound: int = 5, den: int = 1):
    return [[Fraction(rng.randint(-bound, bound), den) for _ in range(d)] for _ in range(g)]


def _shrink_to(model, point, limit_ok, step=Fraction(1, 2)):
    while not limit_ok(max_norm_sq(model, point)):
        point = _scale(step, point)
    return point


def random_gauss_reduced(rng: random.Random, g: int, r: int, a: int) -> Morphism:
    """Random Gauss-reduced integer (a I_r | L) with shuffled columns."""
    while True:
        L = [[rng.randint(-a, a) for _ in range(g - r)] for _ in range(r)]
        if math.gcd(a, *(v for row in L for v in row)) == 1:
            break
    cols = list(range(g))
    rng.shuffle(cols)
    rows = [[0] * g for _ in range(r)]
    for i in range(r):
        rows[i][cols[i]] = a
        for k, j in enumerate(cols[r:]):
            rows[i][j] = L[i][k]
    return Morphism(ZZ, rows)


def random_model(rng: random.Random, s: int, gamma0: int | None = None) -> MWModel:
    """Random positive-definite rational Gram (B^T B + I) with a Gamma_0 prefix."""
    B = [[rng.randint(-3, 3) for _ in range(s)] for _ in range(s)]
    gram = linalg.matmul(linalg.transpose(B), B)
    gram = [[Fraction(gram[i][j]) + (1 if i == j else 0) for j in range(s)] for i in range(s)]
    k = rng.randint(1, s) if gamma0 is None else gamma0
    return MWModel(ZZ, gram, tuple(range(k)))


def kernel_point(rng: random.Random, form: GaussReducedForm, d: int, bound: int = 5):
    """Random integer-free point of ker(phi): free columns arbitrary, pivots solved."""
    phi = form.phi
    g, r, sigma = phi.g, phi.r, form.sigma
    a = form.a.x
    std = form.standard.to_ints()
    free = _random_point(rng, g - r, d, bound)
    k = _zeros(g, d)
    for t, j in enumerate(sigma[r:]):
        k[j] = free[t]
    for i in range(r):
        k[sigma[i]] = [
            -sum((std[i][r + t] * free[t][c] for t in range(g - r)), Fraction(0)) / a for c in range(d)
        ]
    return k


def plant_prop_a(rng: random.Random, g: int, r: int, s: int = 3, *, K1_over_eps: int = 2, pivot=None, xi_zero=False, model=None):
    """Scenario with a planted witness: x = kernel point + Gamma_0 point + small xi.

    Returns (model, phi, x, y, xi, eps, K1).
    """
    model = model if model is not None else random_model(rng, s)
    d = model.dim
    eps = Fraction(1, rng.randint(1, 4))
    K1 = K1_over_eps * eps
    n = approx_exponent(r, g)
    M = max(2, math.ceil(K1 / eps) ** 2) ** n
    a = pivot if pivot is not None else rng.choice([rng.randint(1, M), rng.randint(M + 1, 10**6)])
    phi = random_gauss_reduced(rng, g, r, a)
    k = kernel_point(rng, as_gauss_form(phi), d)
    slots = set(model.basis_slots(model.gamma0))
    y = [[Fraction(rng.randint(-3, 3)) if c in slots else Fraction(0) for c in range(d)] for _ in range(g)]
    if xi_zero:
        xi = _zeros(g, d)
    else:
        xi = _shrink_to(model, _random_point(rng, g, d, bound=3), lambda v: small_ball_holds(v, eps, M, n))
    # keep |x| <= K1 by shrinking the kernel and Gamma_0 parts together
    t = Fraction(1)
    while max_norm_sq(model, _add(_scale(t, _add(k, y)), xi)) > K1 * K1:
        t /= 2
    y = _scale(t, y)
    x = _add(_add(_scale(t, k), y), xi)
    return model, phi, x, y, xi, eps, K1


def equiv_embed_i(phi: Morphism, N, G) -> Morphism:
    """(N phi | phi G): kills (x, gamma) + (xi, 0) whenever phi(x + y + xi) = 0 and [N] y = G gamma."""
    ring = phi.ring
    G = [[e if isinstance(e, RingElem) else RingElem(ring, e) for e in row] for row in G]
    PG = linalg.matmul(phi.rows(), G)
    return Morphism(ring, [[N * e for e in row] + list(pg) for row, pg in zip(phi.rows(), PG)])


def gamma_point(model: MWModel, basis: QuasiOrthonormalBasis, j: int):
    """Coordinates of gamma_j = sum_k coeffs[j][k] g_k, with g_k the Gamma_0 generators."""
    out = [Fraction(0)] * model.dim
    for c, k in zip(basis.coeffs[j], model.gamma0):
        if model.ring.is_order:
            out[2 * k] += Fraction(c.x)
            out[2 * k + 1] += Fraction(c.y)
        else:
            out[k] += Fraction(c)
    return out


def _as_field_elem(model, coords, k):
    if model.ring.is_order:
        return RingElem(model.ring, coords[2 * k], coords[2 * k + 1])
    return Fraction(coords[k])


def represent_in_basis(model: MWModel, basis: QuasiOrthonormalBasis, y):
    """(N, G) with [N] y = G gamma, N the least positive integer making G integral.

    Raises ValueError when some coordinate of y leaves the Gamma_0 span.
    """
    if not in_span(model, y, model.gamma0):
        raise ValueError("y is not in the Gamma_0 span")
    ring = model.ring
    # columns of C: gamma_j in the Gamma_0 generators
    C = [[basis.coeffs[j][k] for j in range(len(basis.coeffs))] for k in range(len(model.gamma0))]
    if ring.is_order:
        C = [[e if isinstance(e, RingElem) else RingElem(ring, e) for e in row] for row in C]
    else:
        C = [[Fraction(e) for e in row] for row in C]
    inv = linalg.inverse(C)
    coeffs = [linalg.matvec(inv, [_as_field_elem(model, p, k) for k in model.gamma0]) for p in y]
    N = 1
    for row in coeffs:
        for c in row:
            parts = (c.x, c.y) if isinstance(c, RingElem) else (c,)
            for part in parts:
                N = math.lcm(N, Fraction(part).denominator)
    if ring.is_order:
        G = [[RingElem(ring, N * c.x, N * c.y) for c in row] for row in coeffs]
    else:
        G = [[int(N * c) for c in row] for row in coeffs]
    return N, G


@dataclass
class SpecialInjection:
    tphi: Morphism
    N: int
    G: list
    n: RingElem
    point: list  # (x, gamma) in E^(g+s)
    label: str
    preconditions: dict

    def check(self) -> list[str]:
        fails = []
        s = len(self.G[0])
        g = self.tphi.g - s
        if self.label != "special" and all(self.preconditions.values()):
            fails.append(f"hypotheses hold but tphi is {self.label}")
        if classify(self.tphi, g, s).label != self.label:
            fails.append("recorded label differs from classify")
        return fails


def special_injection(model: MWModel, phi, x, y, xi, basis: QuasiOrthonormalBasis, eps, K1) -> SpecialInjection:
    """Map x with phi(x + y + xi) = 0, y in Gamma_0^g, to (x, gamma) and the
    morphism tphi = (N phi | phi G) / content annihilating it up to (xi, 0).

    The special label is asserted when the hypotheses hold:
    |x| <= K1, |xi| <= eps <= K1/g and min |gamma_j| >= 3 g K1.
    """
    form = phi if isinstance(phi, GaussReducedForm) else as_gauss_form(phi)
    phi_m = form.phi
    g = phi_m.g
    eps, K1 = Fraction(eps), Fraction(K1)
    x, y, xi = _frac_point(x), _frac_point(y), _frac_point(xi)
    N, G = represent_in_basis(model, basis, y)
    s = len(basis.coeffs)
    big = equiv_embed_i(phi_m, N, G)
    n = content(big.entries).value
    tphi = big.divide(n)
    gamma = [gamma_point(model, basis, j) for j in range(s)]
    point = x + gamma
    image = apply_matrix(tphi, _add(point, xi + _zeros(s, model.dim)))
    pre = {
        "witness_kernel": not any(c for row in apply_matrix(phi_m, _add(_add(x, y), xi)) for c in row),
        "annihilates": not any(c for row in image for c in row),
        "x_norm_le_K1": max_norm_sq(model, x) <= K1 * K1,
        "xi_norm_le_eps": max_norm_sq(model, xi) <= eps * eps,
        "eps_le_K1_over_g": eps * g <= K1,
        "gamma_norm_ge_3gK1": basis.min_norm_sq >= 9 * g * g * K1 * K1,
        "gamma_quasi_orthonormal": basis.lambda_lower >= Fraction(1, 9),
    }
    label = classify(tphi, g, s).label
    out = SpecialInjection(tphi, N, G, n, point, label, pre)
    if all(pre.values()):
        if height(big.columns(range(g, g + s))) > (N * form.a).norm_sq():
            raise AssertionError("H(phi G) > N a under the hypotheses")
        if label != "special":
            raise AssertionError("hypotheses hold but the morphism is not special")
    return out


@dataclass
class QuasiSpecial:
    tphi: Morphism
    N: RingElem
    phi: Morphism
    phi_prime: Morphism | None
    delta: list
    N1: RingElem
    n1: RingElem
    label: str
    shortcut: bool = False


def quasi_special_reduce(tpsi: Morphism, g: int) -> QuasiSpecial:
    """Gauss reduction with pivots in the first g columns and the content
    split Delta tpsi = n1 (N phi | phi').

    Inputs that are already quasi-special (or special) are returned
    unchanged, so the operation is idempotent.
    """
    s, r, ring = tpsi.g - g, tpsi.r, tpsi.ring
    current = classify(tpsi, g, s)
    if current.label in ("special", "quasi-special"):
        ident = linalg.identity(r, ring.one)
        return QuasiSpecial(tpsi, current.N, current.phi, current.phi_prime, ident, current.N, ring.one, current.label, True)
    if tpsi.columns(range(g)).rank() != r:
        raise ValueError("first block has rank below r")
    cols, d = max_minor(tpsi, list(range(g)))
    adj = linalg.adjugate(linalg.submatrix(tpsi.rows(), range(r), cols))
    w, _ = d.canonical()
    adj = [[w * e for e in row] for row in adj]
    m = linalg.matmul(adj, tpsi.rows())
    N1 = content([row[:g] for row in m]).value
    n1 = content(m).value
    N = N1.exact_div(n1)
    phi = Morphism(ring, [[e.exact_div(N1) for e in row[:g]] for row in m])
    rest = Morphism(ring, [[e.exact_div(n1) for e in row[g:]] for row in m]) if s else None
    tphi = Morphism(ring, [[e.exact_div(n1) for e in row] for row in m])
    label = classify(tphi, g, s).label
    if label not in ("special", "quasi-special"):
        raise AssertionError(f"reduction produced a {label} morphism")
    return QuasiSpecial(tphi, N, phi, rest, adj, N1, n1, label)


@dataclass
class ReverseEmbedding:
    """Replay of x in B_{N phi} + Gamma_p^g + O_|zeta| from tphi((x, p) + (xi, xi')) = 0."""

    y: list
    zeta: list
    zeta_norm_sq: Fraction
    K4: Fraction
    eps: Fraction
    holds: bool
    preconditions: dict


def _sqrt_lower(x: Fraction, bits: int = 64) -> Fraction:
    scale = 1 << bits
    return Fraction(math.isqrt(x.numerator * scale * scale // x.denominator), scale)


def equiv_reverse(model: MWModel, qs: QuasiSpecial, p_indices, x, xi, xi_p, eps, K3, c_p, eps_p) -> ReverseEmbedding:
    """Build y' = phi'(p)/(N a) and zeta' = tphi(xi, xi')/(N a) on the pivot
    columns, then check N phi(x + y + zeta) = 0 and |zeta| <= eps K4.

    ``c_p`` must be a rational lower bound of the constant from the
    independence estimate for the points p; min |p_i| is bounded below
    rationally, so the K4 used here is an upper bound of the exact one.
    """
    from .constants import CurveParams

    phi, N = qs.phi, qs.N
    form = as_gauss_form(phi)
    g, s, d = phi.g, len(p_indices), model.dim
    inv = model.ring.one / (N * form.a)
    p_pts = [model.generator(i) for i in p_indices]
    x, xi, xi_p = _frac_point(x), _frac_point(xi), _frac_point(xi_p)
    if qs.phi_prime is not None:
        yp = [act(inv, row) for row in apply_matrix(qs.phi_prime, p_pts)]
    else:
        yp = _zeros(phi.r, d)
    zp = [act(inv, row) for row in apply_matrix(qs.tphi, xi + xi_p)]
    y = _place(yp, form.sigma, g, d)
    zeta = _place(zp, form.sigma, g, d)
    eps, K3 = Fraction(eps), Fraction(K3)
    min_p = _sqrt_lower(min(model.norm_sq(pp) for pp in p_pts))
    params = CurveParams(
        g=g, s=s, deg_C=1, K0=Fraction(0), K1=Fraction(1), K2=Fraction(1), K3=K3,
        vojta_c1=Fraction(1), bogomolov_c={None: Fraction(1)}, c_double_prime=Fraction(1),
        min_p_norm=min_p, max_p_norm=min_p, c_p=Fraction(c_p), eps_p=Fraction(eps_p),
    )
    K4 = equiv_K4(params, eps)
    killed = apply_matrix(qs.tphi, _add(x + p_pts, xi + xi_p))
    residual = apply_matrix(phi, _add(x, _add(y, zeta)))
    pre = {
        "annihilates": not any(c for row in killed for c in row),
        "x_norm_le_K3": max_norm_sq(model, x) <= K3 * K3,
        "perturbation_le_eps": max_norm_sq(model, xi + xi_p) <= eps * eps,
        "eps_le_eps_p": eps <= eps_p,
    }
    zsq = max_norm_sq(model, zeta)
    post = {
        "N_phi_kills_x_y_zeta": not any(c for row in residual for c in row),
        "y_in_gamma_p": in_span(model, y, p_indices),
        "zeta_le_eps_K4": zsq <= (eps * K4) ** 2,
    }
    return ReverseEmbedding(y, zeta, zsq, K4, eps, all(post.values()), {**pre, **post})


def plant_special(rng: random.Random, g: int, r: int, s: int = 2, *, K1=Fraction(1), pivot=None):
    """Scenario for special_injection: G = (kernel combination) + small noise on free columns.

    Returns (model, phi, x, y, xi, basis, eps, K1); the hypotheses may or may
    not hold, which is the point of the property test.
    """
    from .mwlattice import quasi_orthonormal_basis

    model = random_model(rng, s, gamma0=s)
    K1 = Fraction(K1)
    basis = quasi_orthonormal_basis(model, 3 * g * K1)
    a = pivot if pivot is not None else rng.randint(1, 200)
    phi = random_gauss_reduced(rng, g, r, a)
    form = as_gauss_form(phi)
    N = rng.randint(1, 10)
    G = [[0] * s for _ in range(g)]
    for j in range(s):
        for _ in range(rng.randint(0, 2)):
            k = kernel_point(rng, form, 1, bound=3)
            den = math.lcm(*(v[0].denominator for v in k))
            for i in range(g):
                G[i][j] += int(k[i][0] * den)
        if rng.random() < 0.5:
            G[rng.randrange(g)][j] += rng.randint(-10, 10)
    gammas = [gamma_point(model, basis, j) for j in range(s)]
    y = [[sum((Fraction(G[i][j], N) * gammas[j][c] for j in range(s)), Fraction(0)) for c in range(model.dim)] for i in range(g)]
    eps = K1 / g
    xi = _shrink_to(model, _random_point(rng, g, model.dim, bound=2), lambda v: v <= eps * eps)
    target = [[-c for c in row] for row in apply_matrix(phi, _add(y, xi))]
    x = min_norm_preimage(model, phi, target).xi
    return model, phi, x, y, xi, basis, eps, K1


def plant_reverse(rng: random.Random, g: int, r: int, s: int = 2):
    """Scenario for equiv_reverse: tphi = (N phi | phi') quasi-special, small
    (xi, xi') and x solving N phi(x + xi) = -phi'(p + xi').

    Returns (model, QuasiSpecial, p_indices, x, xi, xi_p, eps, K3, c_p, eps_p).
    """
    from .mwlattice import c1_constant

    model = random_model(rng, s, gamma0=s)
    p_idx = tuple(range(s))
    consts = c1_constant(model, p_idx)
    c_p, eps_p = _sqrt_lower(consts.c2), consts.eps0
    while True:
        phi = random_gauss_reduced(rng, g, r, rng.randint(1, 30))
        N = rng.randint(1, 6)
        rest = [[rng.randint(-40, 40) for _ in range(s)] for _ in range(r)]
        tpsi = Morphism(ZZ, [[N * e for e in row] + prow for row, prow in zip(phi.to_ints(), rest)])
        if content(tpsi.entries).value.is_unit():
            break
    qs = quasi_special_reduce(tpsi, g)
    d = model.dim
    eps = eps_p * Fraction(rng.randint(1, 4), 4)
    xi = _shrink_to(model, _random_point(rng, g, d, bound=2), lambda v: v <= eps * eps)
    xi_p = _shrink_to(model, _random_point(rng, s, d, bound=2), lambda v: v <= eps * eps)
    p_pts = [model.generator(i) for i in p_idx]
    target = [[-c for c in row] for row in apply_matrix(qs.phi_prime, _add(p_pts, xi_p))]
    w = min_norm_preimage(model, qs.phi.scale(qs.N), target).xi
    x = _add(_sub(w, xi), kernel_point(rng, as_gauss_form(qs.phi), d, bound=1))
    K3 = _sqrt_upper(max_norm_sq(model, x))
    return model, qs, p_idx, x, xi, xi_p, eps, K3, c_p, eps_p


def _sqrt_upper(x: Fraction, bits: int = 64) -> Fraction:
    lo = _sqrt_lower(x, bits)
    return lo if lo * lo == x else lo + Fraction(1, 1 << bits)
