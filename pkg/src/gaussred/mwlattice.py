"""Finite-rank Mordell-Weil lattice models.

A model has s generators and a positive-definite height pairing.  Over the
integers the pairing is a rational symmetric s x s matrix.  Over an order
it is a Hermitian matrix H with entries in Q(tau) (``RingElem`` with
rational coordinates), and the model works with the induced real structure
on the 2s vectors tau^c * gamma_i (c = 0, 1):

    <tau^c g_i, tau^d g_j> = Re(tau^c * conj(tau)^d * H_ij).

A point of E is a coordinate vector over that real basis (length s or 2s);
a point of E^g is a list of g such vectors.  Norms on E^g use the sum of
the per-coordinate squared norms, which is an inner-product norm within a
factor g of the max-height convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .endring import EndRing, RingElem
from .morphism import Morphism, act, apply_matrix
from .qjson import q, qmat, unq, unqmat

__all__ = [
    "MWModel",
    "RetConstants",
    "RetCheck",
    "QuasiOrthonormalBasis",
    "Preimage",
    "c1_constant",
    "check_ret",
    "quasi_orthonormal_basis",
    "min_norm_preimage",
    "ridi_point",
    "point_norm_sq",
]


def _re(e) -> Fraction:
    return Fraction(e.real_part()) if isinstance(e, RingElem) else Fraction(e)


def _herm_entry(ring: EndRing, value) -> RingElem:
    if isinstance(value, RingElem):
        return value
    if isinstance(value, (list, tuple)):
        return RingElem(ring, unq(value[0]), unq(value[1]))
    return RingElem(ring, unq(value), 0)


@dataclass
class MWModel:
    ring: EndRing
    gram: list  # s x s: Fractions (integers) or RingElems (orders, Hermitian)
    gamma0: tuple[int, ...] = ()
    names: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        s = len(self.gram)
        if s == 0 or any(len(row) != s for row in self.gram):
            raise ValueError("gram must be a nonempty square matrix")
        if self.ring.is_order:
            self.gram = [[_herm_entry(self.ring, e) for e in row] for row in self.gram]
            for i in range(s):
                for j in range(s):
                    if self.gram[i][j] != self.gram[j][i].conj():
                        raise ValueError("gram is not Hermitian")
        else:
            self.gram = [[unq(e) if not isinstance(e, Fraction) else e for e in row] for row in self.gram]
            if any(self.gram[i][j] != self.gram[j][i] for i in range(s) for j in range(s)):
                raise ValueError("gram is not symmetric")
        self.gamma0 = tuple(int(i) for i in self.gamma0)
        if any(not 0 <= i < s for i in self.gamma0):
            raise ValueError("gamma0 index out of range")
        self.real = real_gram(self.ring, self.gram)
        if not linalg.is_positive_definite(self.real):
            raise ValueError("gram is not positive definite")

    @property
    def s(self) -> int:
        return len(self.gram)

    @property
    def dim(self) -> int:
        """Length of a point's real coordinate vector."""
        return self.s * self.ring.rank

    def basis_slots(self, indices):
        """Real coordinate positions belonging to the given generators."""
        k = self.ring.rank
        return [k * i + c for i in indices for c in range(k)]

    def generator(self, i):
        v = [Fraction(0)] * self.dim
        v[self.ring.rank * i] = Fraction(1)
        return v

    def norm_sq(self, point) -> Fraction:
        return point_norm_sq(self, point)

    def inner(self, x, y) -> Fraction:
        g = self.real
        return sum(
            (Fraction(x[i]) * g[i][j] * Fraction(y[j]) for i in range(len(x)) for j in range(len(y)) if x[i] and y[j]),
            Fraction(0),
        )

    def restrict(self, indices) -> "MWModel":
        """Sub-model on the chosen generators."""
        sub = [[self.gram[i][j] for j in indices] for i in indices]
        return MWModel(self.ring, sub, tuple(range(len(indices))))

    def to_json(self) -> dict:
        if self.ring.is_order:
            gram = [[[q(e.x), q(e.y)] for e in row] for row in self.gram]
        else:
            gram = qmat(self.gram)
        out = {"ring": self.ring.to_json(), "gram": gram, "gamma0": list(self.gamma0)}
        if self.names:
            out["generators"] = list(self.names)
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MWModel":
        ring = EndRing.from_json(data.get("ring", {"kind": "integers"}))
        gram = data["gram"]
        if not ring.is_order:
            gram = unqmat(gram)
        return cls(
            ring,
            gram,
            tuple(data.get("gamma0", ())),
            tuple(data.get("generators", ())),
            dict(data.get("metadata", {})),
        )


def real_gram(ring: EndRing, gram):
    """Real symmetric Gram matrix on the real basis described in the module docstring."""
    s = len(gram)
    if not ring.is_order:
        return [[Fraction(gram[i][j]) for j in range(s)] for i in range(s)]
    powers = (ring.one, ring.tau)
    conj_powers = (ring.one, ring.tau.conj())
    out = [[None] * (2 * s) for _ in range(2 * s)]
    for i in range(s):
        for j in range(s):
            for c in range(2):
                for d in range(2):
                    out[2 * i + c][2 * j + d] = _re(powers[c] * conj_powers[d] * gram[i][j])
    return out


def _is_multi(point) -> bool:
    return bool(point) and isinstance(point[0], (list, tuple))


def point_norm_sq(model: MWModel, point) -> Fraction:
    """Squared norm of a point of E (a vector) or of E^g (list of vectors, summed)."""
    if _is_multi(point):
        return sum((point_norm_sq(model, p) for p in point), Fraction(0))
    if len(point) != model.dim:
        raise ValueError(f"point has {len(point)} coordinates, model needs {model.dim}")
    return model.inner(point, point)


def _coeff_norm_sq(ring, b) -> Fraction:
    return Fraction(b.norm_sq()) if isinstance(b, RingElem) else Fraction(b) ** 2


def _as_elem(ring, b) -> RingElem:
    return b if isinstance(b, RingElem) else RingElem(ring, b, 0)


def _isqrt_lower(x: Fraction, bits: int = 64) -> Fraction:
    """Rational lower bound for sqrt(x)."""
    scale = 1 << bits
    return Fraction(math.isqrt(x.numerator * scale * scale // x.denominator), scale)


def _isqrt_upper(x: Fraction, bits: int = 64) -> Fraction:
    scale = 1 << bits
    root = math.isqrt(-(-x.numerator * scale * scale // x.denominator))
    if root * root * x.denominator < x.numerator * scale * scale:
        root += 1
    return Fraction(root, scale)


@dataclass(frozen=True)
class RetConstants:
    """c1 and the derived thresholds for a family of independent points.

    eps0 = c1 * min|p|^2 / (8 s max|p|) involves a square root, so it is
    kept exactly as ``eps0_sq`` with a rational lower bound ``eps0``.
    """

    c1: Fraction
    p_indices: tuple[int, ...]
    min_p_sq: Fraction
    max_p_sq: Fraction

    @property
    def s(self) -> int:
        return len(self.p_indices)

    @property
    def c2(self) -> Fraction:
        return self.c1 / 2

    @property
    def eps0_sq(self) -> Fraction:
        return self.c1**2 * self.min_p_sq**2 / (64 * self.s**2 * self.max_p_sq)

    @property
    def eps0(self) -> Fraction:
        return _isqrt_lower(self.eps0_sq)

    def to_json(self) -> dict:
        return {
            "c1": q(self.c1),
            "c2": q(self.c2),
            "eps0_sq": q(self.eps0_sq),
            "eps0_lower": q(self.eps0),
            "p_indices": list(self.p_indices),
            "min_p_sq": q(self.min_p_sq),
            "max_p_sq": q(self.max_p_sq),
        }


def _family_gram(model: MWModel, p_indices):
    slots = model.basis_slots(p_indices)
    g = [[model.real[i][j] for j in slots] for i in slots]
    k = model.ring.rank
    # block-diagonal part: |b|^2 |p_i|^2 in real coordinates
    d = [[g[i][j] if i // k == j // k else Fraction(0) for j in range(len(slots))] for i in range(len(slots))]
    return g, d


def c1_constant(model: MWModel, p_indices) -> RetConstants:
    """Certified rational c1 with c1 * sum |b_i|^2 |p_i|^2 <= |sum b_i p_i|^2."""
    p_indices = tuple(p_indices)
    if not p_indices:
        raise ValueError("need at least one point")
    g, d = _family_gram(model, p_indices)
    if linalg.det(g) == 0:
        raise ValueError("the chosen points are dependent")
    c1 = min(linalg.certified_min_eig(g, d), Fraction(1))
    norms = [model.norm_sq(model.generator(i)) for i in p_indices]
    return RetConstants(c1, p_indices, min(norms), max(norms))


@dataclass
class RetCheck:
    holds: bool
    lhs: Fraction
    rhs: Fraction
    preconditions_ok: bool
    violations: list[str]

    @property
    def margin(self) -> Fraction:
        return self.rhs - self.lhs


def check_ret(model: MWModel, consts: RetConstants, b, b_extra, xi, zeta) -> RetCheck:
    """Evaluate c2 sum |b_i|^2 |p_i|^2 <= |sum b_i (p_i - xi_i) - b zeta|^2 exactly."""
    ring = model.ring
    b = [_as_elem(ring, x) for x in b]
    b_extra = _as_elem(ring, b_extra)
    if len(b) != consts.s or len(xi) != consts.s:
        raise ValueError("need one coefficient and one perturbation per point")
    violations = []
    for i, x in enumerate(xi):
        if model.norm_sq(x) > consts.eps0_sq:
            violations.append(f"|xi_{i}| > eps0")
    if model.norm_sq(zeta) > consts.eps0_sq:
        violations.append("|zeta| > eps0")
    if b and b_extra.norm_sq() > max(x.norm_sq() for x in b):
        violations.append("|b| > max |b_i|")
    dim = model.dim
    total = [Fraction(0)] * dim
    for bi, i, x in zip(b, consts.p_indices, xi):
        diff = [p - e for p, e in zip(model.generator(i), x)]
        total = [t + v for t, v in zip(total, act(bi, diff))]
    total = [t - v for t, v in zip(total, act(b_extra, zeta))]
    lhs = consts.c2 * sum(
        (_coeff_norm_sq(ring, bi) * model.norm_sq(model.generator(i)) for bi, i in zip(b, consts.p_indices)),
        Fraction(0),
    )
    rhs = model.norm_sq(total)
    return RetCheck(lhs <= rhs, lhs, rhs, not violations, violations)


@dataclass(frozen=True)
class QuasiOrthonormalBasis:
    """gamma_j = sum_k coeffs[j][k] * g_k over the Gamma_0 generators g_k.

    Over an order the coefficients are RingElems with rational coordinates.
    """

    coeffs: tuple
    n0: int
    K: Fraction
    gram: tuple  # Hermitian/symmetric pairing of the new basis
    real: tuple  # its real structure
    lambda_lower: Fraction  # certified lower bound of the normalized least eigenvalue
    min_norm_sq: Fraction
    delta: Fraction

    def check(self) -> list[str]:
        fails = []
        if self.lambda_lower < Fraction(1, 9):
            fails.append("normalized least eigenvalue below 1/9")
        if self.min_norm_sq < self.K**2:
            fails.append("a basis vector is shorter than K")
        return fails


def _to_complex_matrix(ring, gram):
    if ring.is_order:
        return [[e.to_complex() for e in row] for row in gram]
    return [[complex(float(e)) for e in row] for row in gram]


def _complex_to_coeff(ring, c: complex, den: int):
    """Round a complex coefficient to x + y*tau with x, y in (1/den) Z."""
    if not ring.is_order:
        return Fraction(round(c.real * den), den)
    tau = ring.complex_tau()
    y = c.imag / tau.imag
    x = c.real - y * tau.real
    return RingElem(ring, Fraction(round(x * den), den), Fraction(round(y * den), den))


def _gram_schmidt(ring, gram):
    """Float Gram-Schmidt; returns rows of coefficients of an orthonormal basis."""
    h = _to_complex_matrix(ring, gram)
    s = len(h)

    def ip(x, y):
        return sum(x[i] * y[j].conjugate() * h[i][j] for i in range(s) for j in range(s))

    basis = []
    for j in range(s):
        v = [1.0 + 0j if k == j else 0j for k in range(s)]
        for e in basis:
            c = ip(v, e)
            v = [a - c * b for a, b in zip(v, e)]
        nrm = math.sqrt(ip(v, v).real)
        basis.append([a / nrm for a in v])
    return basis


def _transform_gram(ring, coeffs, gram):
    s = len(coeffs)
    out = [[None] * s for _ in range(s)]
    for j in range(s):
        for l in range(s):
            acc = RingElem(ring, 0, 0) if ring.is_order else Fraction(0)
            for k in range(s):
                if not coeffs[j][k]:
                    continue
                for m in range(s):
                    if not coeffs[l][m]:
                        continue
                    if ring.is_order:
                        acc = acc + coeffs[j][k] * coeffs[l][m].conj() * gram[k][m]
                    else:
                        acc += coeffs[j][k] * coeffs[l][m] * gram[k][m]
            out[j][l] = acc
    return out


def quasi_orthonormal_basis(model: MWModel, K, indices=None, max_rounds: int = 30) -> QuasiOrthonormalBasis:
    """Nearly orthogonal basis of the Gamma_0 span with every |gamma_j| >= K.

    Float Gram-Schmidt, rounding of the coefficients to a grid of step
    delta, then scaling by n0 = max(1, ceil(2K)).  The result is verified
    exactly (normalized least eigenvalue >= 1/9 and |gamma_j| >= K); the grid
    is refined until verification passes.
    """
    K = Fraction(K)
    if K <= 0:
        raise ValueError("K must be positive")
    indices = tuple(model.gamma0 if indices is None else indices)
    if not indices:
        raise ValueError("Gamma_0 span is empty")
    ring = model.ring
    sub = model.restrict(indices)
    s = sub.s
    ortho = _gram_schmidt(ring, sub.gram)
    tau_abs = abs(ring.complex_tau()) if ring.is_order else 0.0
    max_g = max(math.sqrt(float(sub.norm_sq(sub.generator(i)))) for i in range(s))
    delta = Fraction(1 / (2 * (1 + tau_abs) * max_g * s)).limit_denominator(10**6)
    n0 = max(1, math.ceil(2 * K))
    for _ in range(max_rounds):
        den = math.ceil(1 / delta)
        coeffs = [[n0 * _complex_to_coeff(ring, c, den) for c in row] for row in ortho]
        gram = _transform_gram(ring, coeffs, sub.gram)
        real = real_gram(ring, gram)
        if linalg.rank(real) == len(real):
            k = ring.rank
            d = [[real[i][j] if i // k == j // k else Fraction(0) for j in range(len(real))] for i in range(len(real))]
            lam = linalg.certified_min_eig(real, d)
            norms = [real[k * j][k * j] for j in range(s)]
            basis = QuasiOrthonormalBasis(
                tuple(tuple(r) for r in coeffs),
                n0,
                K,
                tuple(tuple(r) for r in gram),
                tuple(tuple(r) for r in real),
                lam,
                min(norms),
                delta,
            )
            if not basis.check():
                return basis
        delta /= 2
    raise ArithmeticError("could not certify a quasi-orthonormal basis")


@dataclass(frozen=True)
class Preimage:
    xi: list  # g x dim rational coordinates
    norm_sq: Fraction


def _real_matrix(model: MWModel, phi: Morphism):
    """Matrix of phi acting on flattened real coordinates of E^g."""
    d = model.dim
    rows = []
    for i in range(phi.r):
        for t in range(d):
            row = []
            for j in range(phi.g):
                for u in range(d):
                    unit = [Fraction(0)] * d
                    unit[u] = Fraction(1)
                    row.append(act(phi.entries[i][j], unit)[t])
            rows.append(row)
    return rows


def _flatten(point):
    return [Fraction(c) for p in point for c in p]


def _unflatten(vec, g, d):
    return [list(vec[j * d:(j + 1) * d]) for j in range(g)]


def min_norm_preimage(model: MWModel, phi: Morphism, target, *, coset_gamma0: bool = False) -> Preimage:
    """Least-norm xi in E^g with phi(xi) = target.

    With ``coset_gamma0`` the constraint is relaxed to
    phi(xi) in target + phi(Gamma_0^g), i.e. xi ranges over a coset of
    ker(phi) + Gamma_0^g.
    """
    if phi.ring != model.ring:
        raise ValueError("morphism and model use different rings")
    if phi.rank() != phi.r:
        raise ValueError("phi is not surjective")
    g, d = phi.g, model.dim
    R = _real_matrix(model, phi)
    t = _flatten(target)
    if coset_gamma0 and model.gamma0:
        slots = model.basis_slots(model.gamma0)
        span = [[Fraction(1) if (k == j * d + sl) else Fraction(0) for k in range(g * d)] for j in range(g) for sl in slots]
        images = linalg.matmul(R, linalg.transpose(span))
        ann = linalg.nullspace(linalg.transpose(images))
        if not ann:
            return Preimage(_unflatten([Fraction(0)] * (g * d), g, d), Fraction(0))
        R = linalg.matmul(ann, R)
        t = linalg.matvec(ann, t)
    if not any(t):
        return Preimage(_unflatten([Fraction(0)] * (g * d), g, d), Fraction(0))
    ginv = linalg.inverse(model.real)
    # W^-1 R^T with W = I_g (x) G
    rt = linalg.transpose(R)
    winv_rt = []
    for j in range(g):
        block = rt[j * d:(j + 1) * d]
        winv_rt += linalg.matmul(ginv, block)
    lam = linalg.solve(linalg.matmul(R, winv_rt), t)
    xi = linalg.matvec(winv_rt, lam)
    pt = _unflatten(xi, g, d)
    return Preimage(pt, model.norm_sq(pt))


def kernel_basis(model: MWModel, phi: Morphism):
    """Basis of ker(phi) in flattened real coordinates."""
    return linalg.nullspace(_real_matrix(model, phi))


def is_member(model: MWModel, phi: Morphism, x, eps_sq) -> bool:
    """x in B_phi + O_eps, decided through the least-norm preimage."""
    return min_norm_preimage(model, phi, apply_matrix(phi, x)).norm_sq <= eps_sq


def ridi_point(phi: Morphism, pivot: RingElem, sigma, xi):
    """xi' = (phi(xi)/a placed on the pivot columns, 0 elsewhere), so phi(xi') = phi(xi)."""
    r = phi.r
    image = apply_matrix(phi, xi)
    inv = pivot.ring.one / pivot
    out = [[Fraction(0)] * len(xi[0]) for _ in range(phi.g)]
    for i in range(r):
        out[sigma[i]] = [Fraction(c) for c in act(inv, image[i])]
    return out


def max_norm_sq(model: MWModel, point) -> Fraction:
    """Largest per-coordinate squared norm of a point of E^g."""
    return max(model.norm_sq(p) for p in point)


def in_span(model: MWModel, point, indices) -> bool:
    """Every coordinate of the point lies in the span of the given generators."""
    allowed = set(model.basis_slots(indices))
    return all(not c for p in point for k, c in enumerate(p) if k not in allowed)
