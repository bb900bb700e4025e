"""Randomized invariants checked against independent oracles."""
from fractions import Fraction

from hypothesis import assume, given, settings, strategies as st

from gaussred.dirichlet import dirichlet_approx
from gaussred.endring import EndRing
from gaussred.morphism import Morphism, gauss_reduce, is_gauss_reduced
from gaussred import serialize

from oracles import all_minors, is_gauss_reduced_naive, rank_q, same_rowspace, smallest_dirichlet_f

orders = st.sampled_from([EndRing.order(0, 1), EndRing.order(1, 1), EndRing.order(0, 2), EndRing.order(1, 3)])
small = st.integers(-20, 20)


@settings(max_examples=200)
@given(orders, small, small, small, small)
def test_norm_is_multiplicative(ring, a, b, c, d):
    x, y = ring(a, b), ring(c, d)
    assert (x * y).norm_sq() == x.norm_sq() * y.norm_sq()
    assert (x * x.conj()) == ring(x.norm_sq(), 0)


@settings(max_examples=200)
@given(orders, small, small, small, small)
def test_division_inverts_multiplication(ring, a, b, c, d):
    x, y = ring(a, b), ring(c, d)
    assume(y)
    assert (x * y).exact_div(y) == x


def _matrices(max_r=3, max_g=4):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(r, max_g).flatmap(
            lambda g: st.lists(st.lists(st.integers(-9, 9), min_size=g, max_size=g), min_size=r, max_size=r)
        )
    )


@settings(max_examples=150, deadline=None)
@given(_matrices())
def test_gauss_reduce_invariants(rows):
    assume(rank_q(rows) == len(rows))
    form = gauss_reduce(Morphism.from_ints(rows))
    phi = form.phi.to_ints()
    assert is_gauss_reduced_naive(phi)
    assert is_gauss_reduced(form.phi)
    assert same_rowspace(phi, rows)
    # the pivot block a I_r carries the largest maximal minor of phi
    assert form.a.x ** len(rows) == max(abs(m) for _, m in all_minors(phi))
    assert form.check() == []


@settings(max_examples=60, deadline=None)
@given(_matrices(2, 3))
def test_reduce_certificate_roundtrip(rows):
    assume(rank_q(rows) == len(rows))
    doc = serialize.reduce_certificate(Morphism.from_ints(rows))
    assert serialize.verify(doc) == []


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=50), min_size=1, max_size=3),
    st.integers(2, 5),
)
def test_dirichlet_is_minimal_and_bounded(alpha, Q):
    f, fv = dirichlet_approx(alpha, Q)
    assert f == smallest_dirichlet_f(alpha, Q)
    assert 1 <= f < Q ** len(alpha)
    assert all(abs(a * f - fi) <= Fraction(1, Q) for a, fi in zip(alpha, fv))
