import pytest

from global_shuffle.curve_ring import LineBundleMonomial as LB, make_model
from global_shuffle.quot_weights import (
    Composition,
    WeightList,
    compare_kernel,
    compositions,
    derived_kernel,
    index_sets,
    induction_factor,
    negative_nilradical,
    normalised_derived_kernel,
    pushpull_factor,
    tangent_weights,
)
from global_shuffle.shuffle import kernel_block, kernel_gc, kernel_gc_norm


def test_composition():
    c = Composition.from_cumulative([0, 1, 3])
    assert c.parts == (1, 2) and c.degree == 3 and c.cumulative == (0, 1, 3)
    with pytest.raises(ValueError):
        Composition((1, 0))
    assert [x.parts for x in compositions(3)] == [(1, 1, 1), (1, 2), (2, 1), (3,)]


def test_index_sets():
    tp, tn = index_sets((1, 1))
    assert tn == {(1, 2)}
    assert tp == {(1, 1), (1, 2), (2, 2)}
    assert index_sets((3,))[1] == frozenset()
    assert index_sets((1, 1, 1))[1] == {(1, 2), (1, 3), (2, 3)}


def test_tangent_weights_two_points():
    full, filtered, nilp = tangent_weights((1, 1))
    assert sorted(full.to_json()) == ["t1*t2^-1*O(Delta(1,2))^-1", "t1^-1*t2*O(Delta(1,2))^-1"]
    assert nilp.to_json() == ["t*t1^-1*t2*O(Delta(1,2))"]
    full2, filtered2, nilp2 = tangent_weights((2,))
    assert filtered2.monomials() == full2.monomials() and len(nilp2) == 0
    assert negative_nilradical((1, 1)).monomials() == {LB.make(slots={2: 1, 1: -1}): 1}
    assert isinstance(full, WeightList) and len(full) == 2


def test_induction_factor():
    m = make_model(1, 2)
    assert induction_factor((1, 1), m) == m.tau + m.u(1) - m.u(2)
    assert induction_factor((2,), m) == m.one()
    mm = make_model(1, 2, "multiplicative")
    iota = mm.u(2) / (mm.u(2) - 1)
    inner = mm.u(1) + iota - mm.u(1) * iota
    assert induction_factor((1, 1), mm) == mm.tau + inner - mm.tau * inner


@pytest.mark.parametrize("g", [0, 1, 2])
def test_pushpull_two_points(g):
    m = make_model(g, 2)
    z, D, tau = m.u(2) - m.u(1), m.diagonal_class(1, 2), m.tau
    assert pushpull_factor((1, 1), m) == (z - D) * (tau + z + D) / z
    assert pushpull_factor((2,), m) == m.one()
    # the derived kernel is g_C at the pair (1, 2)
    assert derived_kernel((1, 1), m) == (tau - z) * (z - D) * (tau + z + D) / z
    assert derived_kernel((1, 1), m) == kernel_gc().pair(m, 1, 2)


@pytest.mark.parametrize("parts", [(1, 2), (2, 1), (1, 1, 1)])
@pytest.mark.parametrize("g", [0, 1])
def test_derived_kernel_matches_blocks(parts, g):
    m = make_model(g, 3)
    assert derived_kernel(parts, m) == kernel_block(kernel_gc(), parts, m)
    assert normalised_derived_kernel(parts, m) == kernel_block(kernel_gc_norm(), parts, m)


def test_compare_kernel_multiplicative():
    res = compare_kernel((1, 1), make_model(1, 2, "multiplicative"))
    assert res and res.derived == res.closed_form


def test_degree_mismatch():
    with pytest.raises(ValueError):
        derived_kernel((1, 1), make_model(0, 3))
