"""Morphisms E^g -> E^r as r x g matrices over End(E).

Heights, Gauss reduction with an exact certificate, the special /
quasi-special classification and enumeration of Gauss-reduced integer
matrices of bounded height.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product

from . import linalg
from .endring import ZZ, EndRing, RingElem, content

__all__ = [
    "Morphism",
    "GaussReducedForm",
    "GaussCheck",
    "Classification",
    "height",
    "is_gauss_reduced",
    "gauss_reduce",
    "classify",
    "cm_flatten",
    "enumerate_gauss_reduced",
    "same_row_space",
]


class Morphism:
    """An r x g matrix of RingElem with 1 <= r <= g."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: EndRing, entries):
        rows = tuple(tuple(_elem(ring, e) for e in row) for row in entries)
        if not rows or not rows[0]:
            raise ValueError("a morphism needs at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Morphism is immutable")

    @classmethod
    def from_ints(cls, rows, ring: EndRing = ZZ) -> "Morphism":
        return cls(ring, rows)

    @property
    def r(self) -> int:
        return len(self.entries)

    @property
    def g(self) -> int:
        return len(self.entries[0])

    def __eq__(self, other):
        return (
            isinstance(other, Morphism)
            and self.ring == other.ring
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.ring, self.entries))

    def __repr__(self):
        return f"Morphism({self.to_ints() if not self.ring.is_order else self.rows()})"

    def rows(self):
        return [list(row) for row in self.entries]

    def to_ints(self):
        """Integer matrix (only for the integers ring)."""
        if self.ring.is_order:
            raise ValueError("morphism over an order has no plain integer form")
        return [[e.x for e in row] for row in self.entries]

    def column(self, j):
        return [row[j] for row in self.entries]

    def columns(self, cols) -> "Morphism":
        return Morphism(self.ring, [[row[j] for j in cols] for row in self.entries])

    def permuted(self, sigma) -> "Morphism":
        """Columns reordered so column k of the result is column sigma[k]."""
        return self.columns(sigma)

    def hstack(self, other: "Morphism") -> "Morphism":
        if other.ring != self.ring or other.r != self.r:
            raise ValueError("incompatible blocks")
        return Morphism(self.ring, [a + b for a, b in zip(self.entries, other.entries)])

    def scale(self, c) -> "Morphism":
        return Morphism(self.ring, [[c * e for e in row] for row in self.entries])

    def divide(self, c) -> "Morphism":
        return Morphism(self.ring, [[e.exact_div(c) for e in row] for row in self.entries])

    def left_mul(self, delta) -> "Morphism":
        return Morphism(self.ring, linalg.matmul(delta, self.rows()))

    def is_zero(self) -> bool:
        return not any(e for row in self.entries for e in row)

    def rank(self) -> int:
        return linalg.rank(self.rows())

    def height_sq(self):
        return height(self)

    def apply(self, vectors):
        """Apply to a g-tuple of points given as coordinate lists (one list per factor).

        Entries act through their regular representation on coordinates.
        """
        return apply_matrix(self, vectors)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "g": self.g,
            "ring": self.ring.to_json(),
            "entries": [[[str(e.x), str(e.y)] for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Morphism":
        ring = EndRing.from_json(data.get("ring", {"kind": "integers"}))
        rows = []
        for row in data["entries"]:
            out = []
            for e in row:
                if isinstance(e, (list, tuple)):
                    out.append(RingElem(ring, int(e[0]), int(e[1])))
                else:
                    out.append(RingElem(ring, int(e), 0))
            rows.append(out)
        m = cls(ring, rows)
        if "r" in data and (int(data["r"]), int(data["g"])) != (m.r, m.g):
            raise ValueError("declared shape does not match entries")
        return m


def _elem(ring, e) -> RingElem:
    if isinstance(e, RingElem):
        if e.ring != ring:
            raise ValueError("entry from a different endomorphism ring")
        if not e.is_integral:
            raise ValueError("morphism entries must be integral")
        return e
    if isinstance(e, (tuple, list)):
        return RingElem(ring, e[0], e[1])
    return RingElem(ring, e, 0)


def apply_matrix(phi: Morphism, vectors):
    """phi applied to g points, each a coordinate list of length d.

    Over the integers d is arbitrary.  Over an order the points carry the
    real structure (c0, c1) per generator, so d is even and an entry
    x + y*tau acts blockwise through its 2x2 regular representation.
    """
    if len(vectors) != phi.g:
        raise ValueError("need one point per column")
    d = len(vectors[0])
    out = []
    for row in phi.entries:
        acc = [0] * d
        for e, vec in zip(row, vectors):
            img = act(e, vec)
            acc = [a + b for a, b in zip(acc, img)]
        out.append(acc)
    return out


def act(e: RingElem, vec):
    """Action of a ring element on one point's coordinate vector."""
    if not e.ring.is_order:
        return [e.x * c for c in vec]
    (m00, m01), (m10, m11) = e.regular_rep()
    out = []
    for k in range(0, len(vec), 2):
        c0, c1 = vec[k], vec[k + 1]
        out += [m00 * c0 + m01 * c1, m10 * c0 + m11 * c1]
    return out


def height(phi: Morphism):
    """H(phi)^2: the largest norm_sq among the entries (0 for the zero matrix)."""
    return max(e.norm_sq() for row in phi.entries for e in row)


def height_float(phi: Morphism) -> float:
    return math.sqrt(height(phi))


@dataclass
class GaussCheck:
    ok: bool
    pivot: RingElem | None = None
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    @property
    def diagnosis(self) -> str:
        return "ok" if self.ok else "; ".join(self.violations)


def _pivot_candidates(phi: Morphism):
    """Distinct values a such that every row i has some column equal to a*e_i."""
    rows = phi.entries
    r = phi.r

    def unit_columns(value):
        hits = {}
        for j in range(phi.g):
            col = [row[j] for row in rows]
            nz = [i for i in range(r) if col[i]]
            if len(nz) == 1 and col[nz[0]] == value:
                hits.setdefault(nz[0], j)
        return hits

    seen = []
    for j in range(phi.g):
        col = [row[j] for row in rows]
        nz = [i for i in range(r) if col[i]]
        if len(nz) == 1 and nz[0] == 0 and col[0] not in seen:
            seen.append(col[0])
    for a in seen:
        if len(unit_columns(a)) == r:
            yield a, unit_columns(a)


def is_gauss_reduced(phi: Morphism, *, strict_sign: bool = True) -> GaussCheck:
    """Check for phi = (a I_r | L) up to column order, with H(phi) = |a| and
    unit content.  Over the integers a > 0 is required when ``strict_sign``."""
    violations = []
    candidates = list(_pivot_candidates(phi))
    if phi.ring.is_order or not strict_sign:
        pool = candidates
    else:
        pool = [(a, c) for a, c in candidates if a.x > 0]
    h = height(phi)
    pivot = None
    if not pool:
        if candidates:
            violations.append("pivot submatrix a*I_r has a <= 0")
        else:
            violations.append("no a*I_r submatrix")
    else:
        best = max(pool, key=lambda t: t[0].norm_sq())[0]
        pivot = best
        if best.norm_sq() != h:
            violations.append(f"height exceeds pivot (H^2={h} > |a|^2={best.norm_sq()})")
    if phi.is_zero():
        violations.append("zero matrix")
    elif not content(phi.entries).value.is_unit():
        violations.append(f"nontrivial content {content(phi.entries).value}")
    return GaussCheck(not violations, pivot, violations)


@dataclass(frozen=True)
class GaussReducedForm:
    """Certificate for a Gauss reduction: delta @ psi = N * phi.

    ``phi`` keeps the column order of ``psi``; ``sigma`` lists pivot columns
    first (in row order) then the remaining columns ascending, so
    ``phi.permuted(sigma)`` is literally (a I_r | L).
    """

    psi: Morphism
    phi: Morphism
    a: RingElem
    sigma: tuple[int, ...]
    delta: tuple[tuple[RingElem, ...], ...]
    N: RingElem
    content_partial: bool = False

    @property
    def r(self):
        return self.phi.r

    @property
    def g(self):
        return self.phi.g

    @property
    def standard(self) -> Morphism:
        return self.phi.permuted(self.sigma)

    @property
    def L(self) -> Morphism:
        return self.standard.columns(range(self.r, self.g))

    def check(self) -> list[str]:
        """Re-verify every invariant; returns the list of failures."""
        fails = []
        lhs = linalg.matmul([list(r) for r in self.delta], self.psi.rows())
        rhs = [[self.N * e for e in row] for row in self.phi.entries]
        if lhs != rhs:
            fails.append("certificate identity delta*psi = N*phi")
        std = self.standard
        for i in range(self.r):
            for k in range(self.r):
                want = self.a if i == k else self.a.ring.zero
                if std.entries[i][k] != want:
                    fails.append("pivot block is not a*I_r")
                    break
            else:
                continue
            break
        if sorted(self.sigma) != list(range(self.g)):
            fails.append("sigma is not a permutation")
        if height(self.phi) != self.a.norm_sq():
            fails.append("height differs from |a|")
        if not self.phi.ring.is_order and self.a.x <= 0:
            fails.append("pivot not positive")
        if not content(self.phi.entries).value.is_unit():
            fails.append("content not trivial")
        return fails

    def to_json(self) -> dict:
        return {
            "psi": self.psi.to_json(),
            "phi": self.phi.to_json(),
            "a": [str(self.a.x), str(self.a.y)],
            "sigma": list(self.sigma),
            "delta": [[[str(e.x), str(e.y)] for e in row] for row in self.delta],
            "N": [str(self.N.x), str(self.N.y)],
            "content_partial": self.content_partial,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GaussReducedForm":
        psi = Morphism.from_json(data["psi"])
        phi = Morphism.from_json(data["phi"])
        ring = phi.ring

        def el(p):
            return RingElem(ring, int(p[0]), int(p[1]))

        return cls(
            psi=psi,
            phi=phi,
            a=el(data["a"]),
            sigma=tuple(int(i) for i in data["sigma"]),
            delta=tuple(tuple(el(e) for e in row) for row in data["delta"]),
            N=el(data["N"]),
            content_partial=bool(data.get("content_partial", False)),
        )


def max_minor(psi: Morphism, cols_range=None):
    """First r-column minor of maximal modulus in lexicographic column order."""
    rows = psi.rows()
    if cols_range is not None:
        rows = [[row[j] for j in cols_range] for row in rows]
    best_cols, best_det, best_n = None, None, -1
    for cols, d in linalg.minors(rows):
        n = d.norm_sq()
        if n > best_n:
            best_cols, best_det, best_n = cols, d, n
    if best_n <= 0:
        raise ValueError(f"rank deficient: the {len(rows)} rows are dependent")
    if cols_range is not None:
        best_cols = tuple(cols_range[j] for j in best_cols)
    return best_cols, best_det


def _sigma(pivot_cols, g):
    rest = [j for j in range(g) if j not in pivot_cols]
    return tuple(pivot_cols) + tuple(rest)


def gauss_reduce(psi: Morphism, pivot_block=None) -> GaussReducedForm:
    """Gauss-reduce a rank-r morphism.

    The pivot block is the first r x r minor of maximal modulus; its
    adjugate turns every entry into an r x r minor, so the pivot dominates.
    ``pivot_block`` restricts the search to a subset of columns (the rest
    are carried along).
    """
    r, g = psi.r, psi.g
    if r > g:
        raise ValueError("need r <= g")
    cols, d = max_minor(psi, pivot_block)
    adj = linalg.adjugate(linalg.submatrix(psi.rows(), range(r), cols))
    m = linalg.matmul(adj, psi.rows())
    c = content(m)
    n = c.value
    phi_rows = [[e.exact_div(n) for e in row] for row in m]
    a = d.exact_div(n)
    w, a = a.canonical()
    phi_rows = [[w * e for e in row] for row in phi_rows]
    delta = tuple(tuple(w * e for e in row) for row in adj)
    return GaussReducedForm(
        psi=psi,
        phi=Morphism(psi.ring, phi_rows),
        a=a,
        sigma=_sigma(cols, g),
        delta=delta,
        N=n,
        content_partial=c.partial,
    )


def same_row_space(a: Morphism, b: Morphism) -> bool:
    """Equal row spaces over the fraction field."""
    ra, rb = a.rank(), b.rank()
    return ra == rb == linalg.rank(a.rows() + b.rows())


@dataclass
class Classification:
    label: str
    N: RingElem | None = None
    phi: Morphism | None = None
    phi_prime: Morphism | None = None
    reason: str = ""

    def to_json(self) -> dict:
        out = {"label": self.label, "reason": self.reason}
        if self.N is not None:
            out["N"] = [str(self.N.x), str(self.N.y)]
            out["phi"] = self.phi.to_json()
            out["phi_prime"] = self.phi_prime.to_json() if self.phi_prime else None
        return out


_LABELS = ("special", "quasi-special", "gauss-reduced", "none")


def _quasi_special_split(tphi: Morphism, g: int):
    first = tphi.columns(range(g))
    if first.rank() != tphi.r:
        return None, "first block has rank below r"
    c = content(first.entries).value
    phi = first.divide(c)
    check = is_gauss_reduced(phi)
    if not check:
        return None, f"first block over its content is not Gauss-reduced ({check.diagnosis})"
    if not content(tphi.entries).value.is_unit():
        return None, "nontrivial total content"
    rest = tphi.columns(range(g, tphi.g)) if tphi.g > g else None
    return (c, phi, rest, check.pivot), ""


def _special_second_form(tphi: Morphism, g: int) -> bool:
    # tphi Gauss-reduced with an H(tphi)*I_r block inside the first g columns
    check = is_gauss_reduced(tphi)
    if not check:
        return False
    first = tphi.columns(range(g))
    return any(b == check.pivot for b, _ in _pivot_candidates(first))


def classify(tphi: Morphism, g: int, s: int) -> Classification:
    """Strongest label among special > quasi-special > gauss-reduced > none."""
    if tphi.g != g + s:
        raise ValueError(f"expected {g + s} columns, got {tphi.g}")
    split, reason = _quasi_special_split(tphi, g)
    second = _special_second_form(tphi, g)
    if split is not None:
        n, phi, rest, a = split
        first_form = height(tphi) == (n * a).norm_sq()
        if first_form != second:
            raise AssertionError("the two formulations of special disagree")
        label = "special" if first_form else "quasi-special"
        return Classification(label, n, phi, rest)
    if second:
        raise AssertionError("second special formulation holds without a quasi-special split")
    if is_gauss_reduced(tphi):
        return Classification("gauss-reduced", reason=reason)
    return Classification("none", reason=reason)


def cm_flatten(phi: Morphism) -> Morphism:
    """Split phi = phi1 + tau*phi2 and return the integer matrix (phi1 | phi2)."""
    if not phi.ring.is_order:
        raise ValueError("cm_flatten needs a morphism over an order")
    rows = [[e.x for e in row] + [e.y for e in row] for row in phi.entries]
    return Morphism(ZZ, rows)


def enumerate_gauss_reduced(g: int, r: int, M: int):
    """Yield every Gauss-reduced integer r x g matrix with 0 < a = H <= M once.

    Ordered by pivot value, then pivot column placement, then the free
    entries lexicographically.  A placement is kept only when each pivot
    column is the leftmost column equal to a*e_i, so matrices with several
    a*e_i columns are produced exactly once.
    """
    if not 1 <= r <= g:
        raise ValueError("need 1 <= r <= g")
    if M < 1:
        return
    for a in range(1, M + 1):
        vals = range(-a, a + 1)
        for placement in permutations(range(g), r):
            free = [j for j in range(g) if j not in placement]
            for fill in product(vals, repeat=r * len(free)):
                rows = [[0] * g for _ in range(r)]
                for i, j in enumerate(placement):
                    rows[i][j] = a
                it = iter(fill)
                for j in free:
                    for i in range(r):
                        rows[i][j] = next(it)
                if math.gcd(a, *fill) != 1:
                    continue
                if not _leftmost_pivots(rows, placement, a):
                    continue
                yield Morphism(ZZ, rows)


def _leftmost_pivots(rows, placement, a):
    r = len(rows)
    for i, j in enumerate(placement):
        for k in range(j):
            if rows[i][k] == a and all(rows[t][k] == 0 for t in range(r) if t != i):
                return False
    return True


def as_gauss_form(phi: Morphism) -> GaussReducedForm:
    """Wrap an already Gauss-reduced morphism as a trivial certificate
    (delta = I, N = 1), keeping its own pivot columns."""
    chk = is_gauss_reduced(phi)
    if not chk:
        raise ValueError(f"not Gauss-reduced: {chk.diagnosis}")
    cols = next(c for a, c in _pivot_candidates(phi) if a == chk.pivot)
    pivots = [cols[i] for i in range(phi.r)]
    one, zero = phi.ring.one, phi.ring.zero
    delta = tuple(tuple(one if i == k else zero for k in range(phi.r)) for i in range(phi.r))
    return GaussReducedForm(
        psi=phi,
        phi=phi,
        a=chk.pivot,
        sigma=_sigma(pivots, phi.g),
        delta=delta,
        N=one,
        content_partial=not phi.ring.is_principal,
    )
