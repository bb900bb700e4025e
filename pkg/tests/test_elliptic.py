from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gaussred.elliptic import (
    INF,
    PrecisionUnreachable,
    RatPoint,
    WeierstrassCurve,
    canonical_height,
    height_pairing_gram,
    torsion_order,
)
from gaussred.linalg import det

from oracles import doubling_limit_height, is_psd_by_minors

C37 = WeierstrassCurve(0, 0, 1, -1, 0)
C389 = WeierstrassCurve(0, 1, 1, -2, 0)


def test_curve_invariants():
    assert C37.discriminant == 37
    assert C389.discriminant == 389
    with pytest.raises(ValueError):
        WeierstrassCurve(0, 0, 0, 0, 0)


def test_group_law_on_37a():
    P = C37.point(0, 0)
    assert C37.double(P) == C37.point(1, 0)
    assert C37.add(P, C37.point(1, 0)) == C37.point(-1, -1)
    assert C37.add(P, C37.neg(P)) == INF
    assert C37.scalar(0, P) == INF
    assert C37.scalar(-3, P) == C37.neg(C37.scalar(3, P))
    assert C37.scalar(5, P) == C37.add(C37.scalar(2, P), C37.scalar(3, P))


def test_point_not_on_curve_rejected():
    with pytest.raises(ValueError):
        C37.point(1, 1)


def _multiples(curve, P, n):
    out, Q = [], INF
    for _ in range(n):
        Q = curve.add(Q, P)
        out.append(Q)
    return out


def test_group_law_associative_and_commutative():
    P, Q = C389.point(0, 0), C389.point(1, 0)
    pts = _multiples(C389, P, 3) + _multiples(C389, Q, 2) + [C389.add(P, Q)]
    for A in pts:
        for B in pts:
            assert C389.add(A, B) == C389.add(B, A)
            for C in pts[:3]:
                assert C389.add(C389.add(A, B), C) == C389.add(A, C389.add(B, C))


def test_torsion_heights_are_exactly_zero():
    # y^2 = x^3 + 1 has the cyclic torsion group of order 6
    curve = WeierstrassCurve(0, 0, 0, 0, 1)
    P = curve.point(2, 3)
    assert torsion_order(curve, P) == 6
    assert torsion_order(curve, curve.point(-1, 0)) == 2
    h = canonical_height(curve, P)
    assert h.is_exact and h.value == 0
    assert canonical_height(curve, INF).value == 0
    assert torsion_order(C37, C37.point(0, 0)) is None


def test_height_of_37a_generator():
    h = canonical_height(C37, C37.point(0, 0), Fraction(1, 10**6))
    assert h.width <= Fraction(1, 10**6)
    assert h.lo <= Fraction("0.0511114082") <= h.hi


@pytest.mark.parametrize("curve,pt", [(C37, (0, 0)), (C389, (1, 0)), (WeierstrassCurve(0, 0, 0, 0, 17), (-2, 3))])
def test_height_matches_doubling_oracle(curve, pt):
    h = canonical_height(curve, curve.point(*pt), Fraction(1, 10**5))
    ref = doubling_limit_height([curve.a1, curve.a2, curve.a3, curve.a4, curve.a6], pt, 9)
    # the naive doubling limit itself is only within about 1e-5 after 9 steps
    assert float(h.lo) - 2e-5 <= ref <= float(h.hi) + 2e-5


def test_height_is_quadratic():
    P = C37.point(0, 0)
    eps = Fraction(1, 100)
    h1 = canonical_height(C37, P, eps)
    h3 = canonical_height(C37, C37.scalar(3, P), eps)
    assert 0 in h1 * 9 - h3


def test_unreachable_precision_raises():
    with pytest.raises(PrecisionUnreachable):
        canonical_height(C37, C37.point(0, 0), Fraction(1, 10**30), max_doublings=3)


def test_gram_of_point_and_its_negative():
    P = C37.point(0, 0)
    gram = height_pairing_gram(C37, [P, C37.neg(P)], Fraction(1, 1000))
    m = gram.midpoint
    assert abs(m[0][0] - m[0][1] * -1) <= Fraction(1, 1000)
    assert m[0][1] < 0 and m[0][0] == m[1][1]
    assert gram.gram[0][1] == gram.gram[1][0]


@pytest.mark.slow
def test_gram_on_389a_is_positive_definite():
    gram = height_pairing_gram(C389, [C389.point(0, 0), C389.point(1, 0)], Fraction(1, 10**4))
    m = gram.midpoint
    assert is_psd_by_minors(m) and det(m) > 0
    assert abs(float(det(m)) - 0.152460177943) < 1e-3
    model = gram.to_model()
    assert model.metadata["gram_radius"]


def test_json_roundtrip():
    assert WeierstrassCurve.from_json(C389.to_json()) == C389
    for P in (INF, C37.point(0, 0), RatPoint(Fraction(1, 4), Fraction(-5, 8))):
        assert RatPoint.from_json(P.to_json()) == P


@settings(max_examples=30, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6))
def test_scalar_is_homomorphism(m, n):
    P = C37.point(0, 0)
    assert C37.scalar(m + n, P) == C37.add(C37.scalar(m, P), C37.scalar(n, P))
