"""Naive reference implementations used only by the tests.

Nothing here imports the package: each routine is the slowest obvious
method, so agreement with the library is evidence rather than tautology.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term *= m[i][perm[i]]
        total += -term if inversions % 2 else term
    return total


def all_minors(m):
    r, g = len(m), len(m[0])
    for cols in itertools.combinations(range(g), r):
        yield cols, leibniz_det([[row[c] for c in cols] for row in m])


def rank_q(m):
    a = [[Fraction(x) for x in row] for row in m]
    rank, rows, cols = 0, len(a), len(a[0])
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rows):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def same_rowspace(a, b):
    return rank_q(a) == rank_q(b) == rank_q(a + b)


def is_gauss_reduced_naive(m):
    """(a I_r | L) up to column permutation, a = max |entry| > 0, gcd of entries 1."""
    r, g = len(m), len(m[0])
    a = max(abs(x) for row in m for x in row)
    if a == 0 or math.gcd(*(x for row in m for x in row)) != 1:
        return False
    for cols in itertools.permutations(range(g), r):
        if all(m[i][cols[k]] == (a if i == k else 0) for i in range(r) for k in range(r)):
            return True
    return False


def count_gauss_reduced_naive(g, r, M):
    count = 0
    for flat in itertools.product(range(-M, M + 1), repeat=r * g):
        m = [list(flat[i * g:(i + 1) * g]) for i in range(r)]
        if is_gauss_reduced_naive(m):
            count += 1
    return count


def smallest_dirichlet_f(alpha, Q):
    """Smallest f >= 1 with |alpha_i f - round| <= 1/Q for all i."""
    f = 1
    while True:
        if all(abs(Fraction(a) * f - round(Fraction(a) * f)) <= Fraction(1, Q) for a in alpha):
            return f
        f += 1


def is_psd_by_minors(m):
    """Every principal minor nonnegative (exact)."""
    n = len(m)
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            if leibniz_det([[m[i][j] for j in idx] for i in idx]) < 0:
                return False
    return True


def weierstrass_double(a, P):
    """Tangent doubling on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 (P not 2-torsion)."""
    a1, a2, a3, a4, a6 = a
    x, y = P
    lam = (3 * x * x + 2 * a2 * x + a4 - a1 * y) / (2 * y + a1 * x + a3)
    x3 = lam * lam + a1 * lam - a2 - 2 * x
    y3 = -(lam + a1) * x3 - (y - lam * x) - a3
    return x3, y3


def doubling_limit_height(a, P, steps):
    """log max(|num x|, |den x|) of 2^steps P divided by 4^steps, in floats."""
    a = [Fraction(c) for c in a]
    Q = (Fraction(P[0]), Fraction(P[1]))
    for _ in range(steps):
        Q = weierstrass_double(a, Q)
    x = Q[0]
    return math.log(max(abs(x.numerator), x.denominator)) / 4**steps
