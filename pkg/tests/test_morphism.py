import random

import pytest

from gaussred import linalg
from gaussred.endring import ZZ, EndRing
from gaussred.morphism import (
    GaussReducedForm,
    Morphism,
    apply_matrix,
    as_gauss_form,
    classify,
    cm_flatten,
    enumerate_gauss_reduced,
    gauss_reduce,
    height,
    is_gauss_reduced,
)

from oracles import all_minors, is_gauss_reduced_naive, same_rowspace

ZI = EndRing.order(0, 1)


def test_reduce_worked_example():
    form = gauss_reduce(Morphism.from_ints([[1, 0, 2], [0, 1, 1]]))
    assert form.phi.to_ints() == [[-1, 2, 0], [1, 0, 2]]
    assert form.a == ZZ(2)
    assert form.sigma == (1, 2, 0)
    assert [[e.x for e in row] for row in form.delta] == [[-1, 2], [1, 0]]
    assert form.N == ZZ(1)
    assert form.check() == []


def test_reduce_single_row_divides_content():
    form = gauss_reduce(Morphism.from_ints([[2, 4, 6]]))
    assert form.phi.to_ints() == [[1, 2, 3]]
    assert form.a == ZZ(3) and form.N == ZZ(2) and form.sigma == (2, 0, 1)


def test_already_reduced_input_wraps_trivially():
    phi = Morphism.from_ints([[1, 0, 2], [0, 1, 1]])
    # (I_2 | L) with max minor 2 elsewhere: not Gauss-reduced, height 2 > pivot 1
    assert not is_gauss_reduced(phi)
    ok = Morphism.from_ints([[2, 0, 1], [0, 2, 1]])
    form = as_gauss_form(ok)
    assert form.phi == ok and form.N == ZZ(1) and form.check() == []


def test_diagnosis_lists_every_violation():
    chk = is_gauss_reduced(Morphism.from_ints([[2, 0, 4], [0, 2, 2]]))
    assert not chk
    assert "height exceeds pivot" in chk.diagnosis
    assert "nontrivial content" in chk.diagnosis


def test_random_reductions_against_minor_oracle():
    rng = random.Random(5)
    for _ in range(150):
        g = rng.randint(2, 5)
        r = rng.randint(1, min(3, g))
        rows = [[rng.randint(-9, 9) for _ in range(g)] for _ in range(r)]
        if linalg.rank(rows) < r:
            continue
        form = gauss_reduce(Morphism.from_ints(rows))
        assert form.check() == []
        best = max(abs(d) for _, d in all_minors(rows))
        assert form.a.x * form.N.x == best
        assert is_gauss_reduced_naive(form.phi.to_ints())
        assert same_rowspace(rows, form.phi.to_ints())


def test_reduce_over_gaussian_integers():
    psi = Morphism(ZI, [[ZI(1, 1), ZI(2), ZI(0, 1)], [ZI(0), ZI(1), ZI(3, -1)]])
    form = gauss_reduce(psi)
    assert form.check() == []
    assert is_gauss_reduced(form.phi)


def test_apply_over_order_uses_regular_rep():
    phi = Morphism(ZI, [[ZI(0, 1)]])
    # tau acting on (c0, c1) = c0 + c1 tau: tau*(1) = tau
    assert apply_matrix(phi, [[1, 0]]) == [[0, 1]]


def test_cm_flatten():
    phi = Morphism(ZI, [[ZI(1, 2), ZI(3)]])
    assert cm_flatten(phi).to_ints() == [[1, 3, 2, 0]]


def test_enumerate_small_count():
    items = list(enumerate_gauss_reduced(2, 1, 1))
    assert len(items) == 5
    assert len(set(items)) == 5
    assert all(is_gauss_reduced(m) for m in items)


def test_classify_labels():
    special = Morphism.from_ints([[2, 0, 1, 2], [0, 2, 1, 0]])
    c = classify(special, 3, 1)
    assert c.label == "special" and c.N == ZZ(1)
    qs = Morphism.from_ints([[2, 0, 0, 3], [0, 2, 0, 0]])
    c = classify(qs, 3, 1)
    assert c.label == "quasi-special" and c.N == ZZ(2)
    assert c.phi.to_ints() == [[1, 0, 0], [0, 1, 0]]
    assert classify(Morphism.from_ints([[1, 0, 0, 0], [0, 1, 0, 0]]), 2, 2).label == "special"
    assert classify(Morphism.from_ints([[1, 1, 5, 0], [0, 1, 0, 1]]), 2, 2).label == "none"


def test_certificate_json_roundtrip():
    form = gauss_reduce(Morphism.from_ints([[3, 1, 4], [1, 5, 9]]))
    back = GaussReducedForm.from_json(form.to_json())
    assert back.check() == [] and back.phi == form.phi and back.sigma == form.sigma


def test_rank_deficient_rejected():
    with pytest.raises(ValueError):
        gauss_reduce(Morphism.from_ints([[1, 2], [2, 4]]))


def test_height_is_squared_modulus():
    assert height(Morphism(ZI, [[ZI(3, 4), ZI(1)]])) == 25
