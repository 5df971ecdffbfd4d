import pytest

from global_shuffle.curve_ring import LineBundleMonomial as LB, NonInvertibleError, permute
from global_shuffle.distributions import (
    Component,
    DistributionError,
    DistributionSeries,
    dist_scale,
    dist_shuffle,
    e_series,
    home_slot,
    kernel_argument,
    series_model,
    shuffle_e_product,
    verify_quadratic,
)
from global_shuffle.expr import parse_line_bundle
from global_shuffle.shuffle import kernel_gc, kernel_gc_norm, trivial_kernel

T1_INV = LB.make(slots={1: -1})
T2_INV = LB.make(slots={2: -1})


def pins(s):
    return [c.pinned for c in s.components]


def test_e_series_pins_euler_class():
    m = series_model(1, 1)
    s = e_series(T1_INV, "Z", m)
    assert pins(s) == [{"Z": -m.u(1)}]
    mm = series_model(0, 1, "multiplicative")
    s = e_series(T1_INV, "Z", mm)
    assert pins(s) == [{"Z": mm.u(1) / (mm.u(1) - 1)}]


def test_e_series_rejects_nilpotent_pin():
    m = series_model(0, 1)
    with pytest.raises(NonInvertibleError):
        e_series(LB(), "Z", m)


def test_home_slot():
    assert home_slot(T2_INV, 1) == T1_INV
    assert home_slot(LB.make(t=1), 2) == LB.make(t=1)
    with pytest.raises(DistributionError):
        home_slot(LB.make(slots={1: 1, 2: 1}), 1)
    with pytest.raises(DistributionError):
        home_slot(LB.make(diagonals={(1, 2): 1}), 1)


def test_scale_by_function():
    m = series_model(1, 2)
    Z, u1, D = m.var("Z"), m.u(1), m.diagonal_class(1, 2)
    s = DistributionSeries(m, ["Z"], [Component((("Z", u1),), m.one())])
    assert dist_scale(s, Z * Z).components[0].weight == u1 * u1
    s = DistributionSeries(m, ["Z"], [Component((("Z", u1 + D),), m.one())])
    expected = m.one() / u1 - D / (u1 * u1) + D * D / (u1 * u1 * u1)
    assert dist_scale(s, m.one() / Z).components[0].weight == expected
    with pytest.raises(DistributionError):
        dist_scale(s, m.var("W"))


def test_components_merge():
    m = series_model(0, 1)
    c = Component((("Z", m.u(1)),), m.one())
    s = DistributionSeries(m, ["Z"], [c, c])
    assert len(s.components) == 1
    assert s.components[0].weight == 2 * m.one()
    assert (s - s).is_zero()


def test_trivial_kernel_product():
    s = shuffle_e_product(T1_INV, T1_INV, trivial_kernel(), genus=1)
    assert len(s.components) == 2
    assert all(c.weight == s.model.one() for c in s.components)


def test_normalised_kernel_weights():
    s = shuffle_e_product(T1_INV, T1_INV, kernel_gc_norm(), genus=1)
    m = s.model
    z, D, tau = m.u(2) - m.u(1), m.diagonal_class(1, 2), m.tau
    w = m.one() - D * (tau + D) / (z * (z + tau))
    weights = {str(c.pinned["Z"]): c.weight for c in s.components}
    assert weights[str(-m.u(1))] == w
    assert weights[str(-m.u(2))] == permute((1, 0), w)


def test_same_variable_twice_is_rejected():
    m = series_model(0, 1)
    s = e_series(T1_INV, "Z", m)
    with pytest.raises(DistributionError):
        dist_shuffle(s, s, kernel_gc())


def test_kernel_argument():
    arg = kernel_argument(T1_INV, T2_INV)
    assert arg == LB.make(extras={"W": 1, "Z": -1})


@pytest.mark.parametrize("g", [0, 1, 2])
@pytest.mark.parametrize("theory", ["additive", "multiplicative"])
def test_easy_quadratic_relation(g, theory):
    res = verify_quadratic(T1_INV, T2_INV, kernel_gc(), g, theory)
    assert res.holds and res.residual.is_zero()
    assert not res.lhs.is_zero()


@pytest.mark.parametrize("l1", ["t1^-1", "t*t1^-1"])
@pytest.mark.parametrize("l2", ["t2^-1", "t*t2^-1"])
def test_general_quadratic_relation(l1, l2):
    res = verify_quadratic(parse_line_bundle(l1), parse_line_bundle(l2), kernel_gc_norm(), 1)
    assert res.holds


def test_out_of_domain_line_bundle():
    # e(t) pins Z to t, where the kernel denominator e(z) e(tz) vanishes
    with pytest.raises(NonInvertibleError):
        verify_quadratic(LB.make(t=1), T2_INV, kernel_gc_norm(), 0)
