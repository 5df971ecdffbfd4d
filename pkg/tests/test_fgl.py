import pytest
from hypothesis import given, settings, strategies as st

from global_shuffle.fgl import PRESETS, fgl_inverse, fgl_sum, make_fgl, parse_theory


def gens(F, names=("u", "v")):
    R = F.series_ring(names)
    return R, [R.gen(n) for n in names]


def test_additive_law():
    F = make_fgl("additive", 4)
    R, (u, v) = gens(F)
    assert fgl_sum(F, u, v) == u + v
    assert fgl_inverse(F, u) == -u


def test_multiplicative_law():
    F = make_fgl("multiplicative", 4)
    R, (u, v) = gens(F)
    assert fgl_sum(F, u, v) == u + v - u * v
    assert fgl_sum(F, u, u) == 2 * u - u * u
    # u/(u-1) = -u - u^2 - u^3 - ... truncated at degree 4
    assert fgl_inverse(F, u) == -u - u ** 2 - u ** 3


def test_universal_law_low_degree():
    F = make_fgl("universal", 3)
    R, (u, v) = gens(F)
    beta = R.gen("beta_1_1")
    assert F.beta_names == ("beta_1_1",)
    assert fgl_sum(F, u, v) == u + v + beta * u * v
    assert fgl_sum(F, u, R.zero()) == u
    assert fgl_inverse(F, u) == -u + beta * u ** 2


@pytest.mark.parametrize("preset", PRESETS)
@pytest.mark.parametrize("n", [2, 5, 8])
def test_inverse_and_associativity(preset, n):
    F = make_fgl(preset, n)
    R, (u, v, w) = gens(F, ("u", "v", "w"))
    assert fgl_sum(F, u, fgl_inverse(F, u)).is_zero()
    assert fgl_sum(F, fgl_sum(F, u, v), w) == fgl_sum(F, u, fgl_sum(F, v, w))
    assert fgl_sum(F, u, v) == fgl_sum(F, v, u)


def test_universal_law_is_not_multiplicative_or_additive():
    F = make_fgl("universal", 5)
    assert len(F.beta_names) == 3
    assert (1, 1) in F.coefficients


def test_parse_theory():
    assert parse_theory("additive").preset == "additive"
    assert parse_theory("universal:5").truncation_degree == 5
    assert parse_theory("universal:5").name == "universal:5"
    with pytest.raises(ValueError):
        parse_theory("additive:3")
    with pytest.raises(ValueError):
        parse_theory("elliptic")
    with pytest.raises(ValueError):
        make_fgl("universal", 1)


def test_inverse_rejects_constant_term():
    F = make_fgl("multiplicative", 4)
    R, (u, v) = gens(F)
    with pytest.raises(ValueError):
        fgl_inverse(F, u + 1)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(PRESETS), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_inverse_of_polynomial_series(preset, coeffs):
    F = make_fgl(preset, 5)
    R, (u, v) = gens(F)
    x = coeffs[0] * u + coeffs[1] * u * v + coeffs[2] * v ** 2
    assert fgl_sum(F, x, fgl_inverse(F, x)).is_zero()
    assert fgl_inverse(F, fgl_inverse(F, x)) == x
