"""Random model and perturbation builders shared by the lattice tests."""
import math
import random
from fractions import Fraction

from gaussred import linalg
from gaussred.endring import ZZ, EndRing
from gaussred.mwlattice import MWModel


def random_gram(rng: random.Random, s: int, spread: int = 3):
    b = [[rng.randint(-spread, spread) for _ in range(s)] for _ in range(s)]
    g = linalg.matmul(linalg.transpose(b), b)
    den = rng.randint(1, 5)
    return [[Fraction(g[i][j] + (1 if i == j else 0), den) for j in range(s)] for i in range(s)]


def random_hermitian_model(rng: random.Random, ring: EndRing, s: int) -> MWModel:
    """H = B^* B + I over the order, which is Hermitian positive definite."""
    b = [[ring(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(s)] for _ in range(s)]
    h = [[sum((b[k][i].conj() * b[k][j] for k in range(s)), ring.zero) + (1 if i == j else 0) for j in range(s)] for i in range(s)]
    return MWModel(ring, h, tuple(range(s)))


def sqrt_floor(x: Fraction, bits: int = 64) -> Fraction:
    scale = 1 << bits
    return Fraction(math.isqrt(x.numerator * scale * scale // x.denominator), scale)


def perturbation(rng: random.Random, model: MWModel, bound_sq: Fraction, at_boundary: bool):
    """Random point of norm^2 <= bound_sq; scaled to the boundary up to 2^-64 when asked."""
    v = [Fraction(rng.randint(-5, 5)) for _ in range(model.dim)]
    if not any(v):
        v[0] = Fraction(1)
    n = model.norm_sq(v)
    t = sqrt_floor(bound_sq / n)
    if not at_boundary:
        t *= Fraction(rng.randint(0, 1000), 1000)
    out = [t * c for c in v]
    assert model.norm_sq(out) <= bound_sq
    return out


def random_coeff(rng, ring, bound=6):
    if ring.is_order:
        return ring(rng.randint(-bound, bound), rng.randint(-bound, bound))
    return ZZ(rng.randint(-bound, bound))
