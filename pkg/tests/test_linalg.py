import random
from fractions import Fraction

import pytest

from gaussred import linalg
from gaussred.endring import EndRing

from oracles import is_psd_by_minors, leibniz_det, rank_q


def _rand(rng, n, m, lo=-6, hi=6):
    return [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)]


def test_det_against_leibniz():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(1, 5)
        m = _rand(rng, n, n)
        assert linalg.det(m) == leibniz_det(m)


def test_det_over_an_order():
    ring = EndRing.order(0, 1)
    m = [[ring(1, 1), ring(2)], [ring(0, 1), ring(3, -1)]]
    assert linalg.det(m) == ring(1, 1) * ring(3, -1) - ring(2) * ring(0, 1)


def test_adjugate_identity():
    rng = random.Random(1)
    for _ in range(100):
        n = rng.randint(1, 4)
        m = _rand(rng, n, n)
        d = linalg.det(m)
        prod = linalg.matmul(linalg.adjugate(m), m)
        assert prod == [[d if i == j else 0 for j in range(n)] for i in range(n)]


def test_rank_and_nullspace():
    rng = random.Random(2)
    for _ in range(100):
        m = _rand(rng, rng.randint(1, 4), rng.randint(1, 5), -2, 2)
        assert linalg.rank(m) == rank_q(m)
        for v in linalg.nullspace(m):
            assert all(x == 0 for x in linalg.matvec(m, v))
        assert len(linalg.nullspace(m)) == len(m[0]) - rank_q(m)


def test_inverse_and_singular():
    m = [[2, 1], [1, 1]]
    assert linalg.matmul(m, linalg.inverse(m)) == [[1, 0], [0, 1]]
    with pytest.raises(ZeroDivisionError):
        linalg.inverse([[1, 2], [2, 4]])


def test_definiteness_against_minors():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 4)
        b = _rand(rng, rng.randint(1, n), n, -2, 2)
        g = linalg.matmul(linalg.transpose(b), b)  # PSD, often singular
        assert linalg.is_positive_semidefinite(g) == is_psd_by_minors(g)
        shifted = [[g[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        assert linalg.is_positive_semidefinite(shifted) == is_psd_by_minors(shifted)


@pytest.mark.parametrize(
    "g, expected",
    [([[1, Fraction(9, 10)], [Fraction(9, 10), 1]], Fraction(1, 10)), ([[2, 1], [1, 2]], Fraction(1))],
)
def test_certified_min_eig_exact_cases(g, expected):
    assert linalg.certified_min_eig(g) == expected


def test_certified_min_eig_is_certified_and_close():
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randint(2, 5)
        b = _rand(rng, n, n, -3, 3)
        g = linalg.matmul(linalg.transpose(b), b)
        g = [[Fraction(g[i][j]) + (1 if i == j else 0) for j in range(n)] for i in range(n)]
        c = linalg.certified_min_eig(g)
        ok = [[g[i][j] - c * (1 if i == j else 0) for j in range(n)] for i in range(n)]
        assert is_psd_by_minors(ok)
        bigger = c * (1 + Fraction(1, 10**6))
        assert not is_psd_by_minors([[g[i][j] - bigger * (1 if i == j else 0) for j in range(n)] for i in range(n)])


def test_det_of_rational_matrix():
    rng = random.Random(12)
    for _ in range(100):
        n = rng.randint(2, 4)
        m = [[Fraction(rng.randint(-9, 9), rng.randint(1, 12)) for _ in range(n)] for _ in range(n)]
        assert linalg.det(m) == leibniz_det(m)
