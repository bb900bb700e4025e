"""Exact dense linear algebra over integral domains and their fraction fields.

Matrices are lists of rows.  Entries may be ints, Fractions or RingElems;
anything supporting +, -, * and exact / works.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def zero_like(e):
    return e * 0


def one_like(e):
    return e * 0 + 1


def transpose(m):
    return [list(col) for col in zip(*m)]


def identity(n, one=1):
    zero = one * 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a or not b:
        raise ValueError("empty matrix")
    if len(a[0]) != len(b):
        raise ValueError(f"shape mismatch {len(a)}x{len(a[0])} @ {len(b)}x{len(b[0])}")
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = row[0] * col[0]
            for x, y in zip(row[1:], col[1:]):
                acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def matvec(a, v):
    return [row[0] for row in matmul(a, [[x] for x in v])]


def submatrix(m, rows, cols):
    return [[m[i][j] for j in cols] for i in rows]


def det(m):
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("det needs a square matrix")
    a = [list(row) for row in m]
    sign = 1
    prev = one_like(a[0][0])
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return zero_like(a[0][0])
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = _exact(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def _exact(num, den):
    if isinstance(num, int) and isinstance(den, int):
        q, r = divmod(num, den)
        # a rational input can leave a non-integral (but still exact) quotient
        return Fraction(num, den) if r else q
    q = num / den
    if isinstance(q, Fraction) and q.denominator == 1:
        return q.numerator
    return q


def adjugate(m):
    """Classical adjoint: adj(m) @ m = det(m) * I."""
    n = len(m)
    one = one_like(m[0][0])
    if n == 1:
        return [[one]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = [k for k in range(n) if k != j]
            cols = [k for k in range(n) if k != i]
            c = det(submatrix(m, rows, cols))
            out[i][j] = c if (i + j) % 2 == 0 else -c
    return out


def minors(m, r=None):
    """Yield (cols, det) for every r-column minor of an r-row matrix, in
    lexicographic column order."""
    r = len(m) if r is None else r
    g = len(m[0])
    for cols in combinations(range(g), r):
        yield cols, det(submatrix(m, range(r), cols))


def _field(e):
    # promote integers to Fractions so row reduction stays exact
    return Fraction(e) if isinstance(e, int) else e


def _row_reduce(m):
    a = [[_field(e) for e in row] for row in m]
    rows, cols = len(a), len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = a[r][c]
        a[r] = [e / inv for e in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m) -> int:
    if not m or not m[0]:
        return 0
    return len(_row_reduce(m)[1])


def rref(m):
    return _row_reduce(m)


def inverse(m):
    n = len(m)
    one = one_like(m[0][0])
    aug = [list(row) + identity(n, one)[i] for i, row in enumerate(m)]
    red, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def solve(m, b):
    """Solve the square nonsingular system m x = b exactly."""
    inv = inverse(m)
    return matvec(inv, b)


def nullspace(m):
    """Basis of the right kernel {x : m x = 0} over the fraction field."""
    if not m:
        return []
    cols = len(m[0])
    red, pivots = _row_reduce(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def is_positive_definite(m) -> bool:
    """Exact test via the LDL^T pivots of a symmetric rational matrix."""
    a = [[Fraction(e) for e in row] for row in m]
    n = len(a)
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
    return True


def is_positive_semidefinite(m) -> bool:
    """Exact test via LDL^T with diagonal pivoting; a zero pivot forces its
    whole row to vanish."""
    a = [[Fraction(e) for e in row] for row in m]
    idx = list(range(len(a)))
    while idx:
        k = max(idx, key=lambda i: a[i][i])
        if a[k][k] < 0:
            return False
        if a[k][k] == 0:
            return all(a[i][j] == 0 for i in idx for j in idx)
        idx.remove(k)
        for i in idx:
            f = a[i][k] / a[k][k]
            if f:
                for j in idx:
                    a[i][j] -= f * a[k][j]
    return True


def _float_min_generalized_eig(g, d) -> float:
    import numpy as np

    gf = np.array([[float(x) for x in row] for row in g])
    df = np.array([[float(x) for x in row] for row in d])
    chol = np.linalg.cholesky(df)
    inv = np.linalg.inv(chol)
    return float(np.linalg.eigvalsh(inv @ gf @ inv.T)[0])


def certified_min_eig(g, d=None, *, rel_tol=Fraction(1, 2**40)) -> Fraction:
    """Rational c > 0 with g - c*d positive semidefinite, close to the least
    generalized eigenvalue of (g, d).  ``d`` defaults to the identity.

    A float estimate is snapped to a nearby simple rational when that passes
    the exact PSD test; otherwise bisection with exact tests takes over.
    """
    n = len(g)
    if d is None:
        d = identity(n, Fraction(1))
    if not is_positive_definite(g):
        raise ValueError("matrix is not positive definite")

    def ok(c):
        return is_positive_semidefinite(
            [[g[i][j] - c * d[i][j] for j in range(n)] for i in range(n)]
        )

    est = Fraction(_float_min_generalized_eig(g, d))
    if est > 0:
        for bound in (10**3, 10**6, 10**9):
            cand = est.limit_denominator(bound)
            if 0 < cand and abs(cand - est) <= est * Fraction(1, 10**9) and ok(cand):
                return cand
        cand = est * (1 - rel_tol)
        if ok(cand):
            return cand
    # bisection on [lo, hi] with lo certified and hi rejected
    lo, hi = Fraction(0), max(est, Fraction(0)) * 2 + 1
    while ok(hi):
        lo, hi = hi, hi * 2
    while hi - lo > rel_tol * hi:
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
