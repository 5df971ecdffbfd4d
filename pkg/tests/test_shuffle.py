import random

import pytest

from global_shuffle.curve_ring import (
    LineBundleMonomial as LB,
    embed,
    euler,
    is_symmetric,
    make_model,
    permute,
    specialize,
)
from global_shuffle.shuffle import (
    ShuffleElement,
    ShuffleTree,
    cross_pairs,
    evaluate_tree,
    evaluate_tree_at,
    genus_generator,
    kernel_block,
    kernel_by_name,
    kernel_gc,
    kernel_gc_norm,
    random_point,
    rn_factor,
    rn_inverse,
    rn_map,
    shuffle_cosets,
    shuffle_product,
    trivial_kernel,
    verify_genus_relation,
)


def unit(model):
    return ShuffleElement.make(model.one())


@pytest.mark.parametrize("g", [0, 1, 2])
def test_gc_additive_closed_form(g):
    m = make_model(g, 2)
    z, D, tau = m.u(2) - m.u(1), m.diagonal_class(1, 2), m.tau
    assert kernel_gc().pair(m, 1, 2) == (tau - z) * (z - D) * (tau + z + D) / z


@pytest.mark.parametrize("g", [0, 1, 2])
def test_gc_norm_additive_closed_form(g):
    m = make_model(g, 2)
    z, D, tau = m.u(2) - m.u(1), m.diagonal_class(1, 2), m.tau
    assert kernel_gc_norm().pair(m, 1, 2) == m.one() - D * (tau + D) / (z * (z + tau))


def test_gc_norm_genus_zero():
    m = make_model(0, 2)
    z, tau = m.u(2) - m.u(1), m.tau
    D = m.point(1) + m.point(2)
    assert kernel_gc_norm().pair(m, 1, 2) == m.one() - D * (tau + D) / (z * (z + tau))


@pytest.mark.parametrize("theory", ["additive", "multiplicative"])
def test_kernel_ratio(theory):
    m = make_model(1, 2, theory)
    z = LB.make(slots={2: 1, 1: -1})
    t = LB.make(t=1)
    ratio = euler(m, t * z.inverse()) * euler(m, t * z)
    assert kernel_gc().pair(m, 1, 2) == kernel_gc_norm().pair(m, 1, 2) * ratio


def test_kernel_block():
    m3 = make_model(1, 3)
    g = kernel_gc_norm()
    assert cross_pairs((1, 1, 1)) == [(1, 2), (1, 3), (2, 3)]
    assert kernel_block(g, (3,), m3) == m3.one()
    assert kernel_block(g, (1, 1), m3.with_factors(2)) == g.pair(m3.with_factors(2), 1, 2)
    inner = embed(kernel_block(g, (1, 1), m3.with_factors(2)), m3, [1, 2])
    assert kernel_block(g, (1, 1, 1), m3) == kernel_block(g, (1, 2), m3) * inner
    with pytest.raises(ValueError):
        kernel_block(g, (1, 1), m3)


def test_kernel_by_name():
    assert kernel_by_name("gc") is kernel_gc()
    with pytest.raises(ValueError):
        kernel_by_name("nope")


def test_cosets():
    assert shuffle_cosets(1, 1) == [(0, 1), (1, 0)]
    assert len(shuffle_cosets(2, 3)) == 10


def test_degree_zero_scalar_is_identity():
    m0 = make_model(1, 0)
    m1 = make_model(1, 1)
    c = ShuffleElement.make(m0.scalar(3))
    f = ShuffleElement.make(m1.u(1) * m1.point(1) + m1.tau)
    assert shuffle_product(c, f, kernel_gc()) == f.scale(3)
    assert shuffle_product(f, c, kernel_gc()) == f.scale(3)


def test_unit_square_normalised():
    m1 = make_model(2, 1)
    m2 = m1.with_factors(2)
    z, D, tau = m2.u(2) - m2.u(1), m2.diagonal_class(1, 2), m2.tau
    value = shuffle_product(unit(m1), unit(m1), kernel_gc_norm()).value
    assert value == 2 * m2.one() - 2 * D * (tau + D) / (z * z - tau * tau)


def test_trivial_kernel_is_symmetrisation():
    m1 = make_model(1, 1)
    f = ShuffleElement.make(m1.u(1) ** 2)
    h = ShuffleElement.make(m1.curve_class("a", 1, 1) * m1.u(1) + m1.point(1))
    out = shuffle_product(f, h, trivial_kernel()).value
    m2 = m1.with_factors(2)
    base = embed(f.value, m2, [0]) * embed(h.value, m2, [1])
    assert out == base + permute((1, 0), base)


@pytest.mark.parametrize("kernel", ["gc", "gcnorm"])
def test_product_is_symmetric_and_associative(kernel):
    g = kernel_by_name(kernel)
    m1 = make_model(1, 1)
    e0 = unit(m1)
    left = shuffle_product(shuffle_product(e0, e0, g), e0, g)
    right = shuffle_product(e0, shuffle_product(e0, e0, g), g)
    assert left == right
    assert is_symmetric(left.value)


def test_shuffle_jobs_do_not_change_result():
    m1 = make_model(1, 1, "multiplicative")
    f = ShuffleElement.make(m1.u(1) + m1.point(1))
    m2 = m1.with_factors(2)
    h = ShuffleElement.make(m2.u(1) * m2.u(2))
    assert shuffle_product(f, h, kernel_gc(), jobs=1) == shuffle_product(f, h, kernel_gc(), jobs=3)


def test_rejects_non_symmetric():
    m2 = make_model(0, 2)
    with pytest.raises(ValueError):
        ShuffleElement.make(m2.u(1))


def test_pointwise_matches_symbolic():
    m1 = make_model(1, 1)
    f = ShuffleElement.make(m1.u(1) * m1.point(1) + m1.u(1) ** 2)
    h = ShuffleElement.make(m1.tau + m1.u(1))
    tree = ShuffleTree(ShuffleTree(f, h, kernel_gc()), f, kernel_gc())
    exact = evaluate_tree(tree).value
    rng = random.Random(7)
    for _ in range(3):
        us, fixed = random_point(tree.model, rng, size=1000)
        point = {**fixed, **{f"u{k + 1}": v for k, v in enumerate(us)}}
        assert evaluate_tree_at(tree, us, fixed) == specialize(exact, point)
        assert not evaluate_tree_at(tree, us, fixed).is_zero()


def test_rn_factor_degree_two():
    m2 = make_model(1, 2)
    tau, u1, u2 = m2.tau, m2.u(1), m2.u(2)
    assert rn_factor(m2) == (tau + u2 - u1) * (tau + u1 - u2)
    assert rn_factor(make_model(1, 1)) == make_model(1, 1).one()


@pytest.mark.parametrize("theory", ["additive", "multiplicative"])
def test_rn_morphism(theory):
    m1 = make_model(1, 1, theory)
    f = ShuffleElement.make(m1.u(1) ** 2)
    h = ShuffleElement.make(m1.u(1) ** -1)
    lhs = rn_map(shuffle_product(f, h, kernel_gc_norm()))
    rhs = shuffle_product(rn_map(f), rn_map(h), kernel_gc())
    assert lhs == rhs
    assert rn_inverse(lhs) == shuffle_product(f, h, kernel_gc_norm())


@pytest.mark.parametrize("g,i,j", [(0, 0, 0), (1, 0, 1), (2, 2, 3)])
def test_genus_relation(g, i, j):
    res = verify_genus_relation(i, j, make_model(g, 2))
    assert res.holds and res.residual.is_zero()


def test_genus_relation_direct_reading_fails():
    # e_i = u_1^i is not the reading under which the relation holds
    res = verify_genus_relation(0, 1, make_model(1, 2), reading="direct")
    assert not res.holds


def test_genus_generator_dual():
    m1 = make_model(0, 1)
    assert genus_generator(m1, 2) == m1.u(1) ** 2
    assert genus_generator(m1, 1, "direct") == m1.u(1)
    with pytest.raises(ValueError):
        genus_generator(m1, 1, "other")


def test_genus_relation_needs_additive():
    with pytest.raises(ValueError):
        verify_genus_relation(0, 0, make_model(0, 2, "multiplicative"))
