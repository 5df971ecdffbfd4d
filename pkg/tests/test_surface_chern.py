from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from global_shuffle.surface_chern import (
    CurveEvenClass,
    SurfaceClass,
    c2_from_ch,
    ch_from_invariants,
    framed_ch_by_construction,
    framed_invariants,
    grr_chain,
    grr_pushforward,
    solve_torsion_pushforward,
    surf_mul,
    todd_curve,
    todd_surface,
)


@pytest.mark.parametrize("g", [0, 1, 2, 3])
def test_intersection_rules(g):
    D, f = SurfaceClass.D(g), SurfaceClass.f(g)
    assert surf_mul(D, f) == SurfaceClass.point(g)
    assert surf_mul(D, D) == SurfaceClass.point(g) * (2 - 2 * g)
    assert surf_mul(f, f) == SurfaceClass(0, 0, 0, 0, g)


def test_todd_classes():
    assert todd_surface(0) == SurfaceClass(1, 1, 0, 1, 0)
    assert todd_surface(1) == SurfaceClass(1, 1, 0, 0, 1)
    assert todd_curve(2) == CurveEvenClass(1, -1, 2)


def test_todd_square_genus_one():
    # (1, D, 0)^2 = (1, 2D, D^2) and D^2 = 2 - 2g = 0 at genus 1
    assert surf_mul(todd_surface(1), todd_surface(1)) == SurfaceClass(1, 2, 0, 0, 1)


def test_pushforward():
    assert grr_pushforward(SurfaceClass(1, 2, 3, 5, 0)) == CurveEvenClass(2, 5, 0)
    assert grr_pushforward(SurfaceClass(0, 0, 0, 0, 2)) == CurveEvenClass(0, 0, 2)
    for g in range(4):
        assert grr_pushforward(todd_surface(g)) == todd_curve(g)


def test_genus_mismatch():
    with pytest.raises(ValueError):
        SurfaceClass.D(0) + SurfaceClass.D(1)


def test_curve_division():
    x = CurveEvenClass(3, 5, 1)
    y = CurveEvenClass(2, 7, 1)
    assert (x * y) / y == x
    with pytest.raises(ZeroDivisionError):
        x / CurveEvenClass(0, 1, 1)


ints = st.integers(-6, 6)


@given(ints, ints, ints, ints, st.integers(0, 3))
def test_grr_chain_closed_form(r, a, b, c2, g):
    expected = CurveEvenClass(a + r, (r + a * a + 2 * a) * (1 - g) + (a + 1) * b - c2, g)
    assert grr_chain(r, a, b, c2, g) == expected
    assert c2_from_ch(ch_from_invariants(r, a, b, c2, g)) == c2


@given(st.integers(1, 6), ints, st.integers(0, 6), st.integers(0, 3))
def test_torsion_solve(r, b, d, g):
    sol = solve_torsion_pushforward(r, b, d, g)
    assert sol.a == -r
    assert sol.c2 == d + (r - 1) * (r * (1 - g) - b)


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("d", range(1, 6))
@pytest.mark.parametrize("g", range(4))
def test_framed_invariants(n, d, g):
    inv = framed_invariants(n, d, g)
    assert inv.c2 == d + n * (n - 1) * (g - 1)
    assert (inv.c1_D, inv.c1_f) == (-n, n * (2 - 2 * g))
    assert inv.ch == SurfaceClass(n, -n, n * (2 - 2 * g), -n * (1 - g) - d, g)
    assert inv.ch == framed_ch_by_construction(n, d, g)


def test_chern_example():
    inv = framed_invariants(1, 3, 2)
    assert inv.c2 == 3
    assert inv.ch == SurfaceClass(1, -1, -2, -2, 2)
    assert inv.to_json()["ch"]["c"] == "-2"
    assert isinstance(inv.c2, Fraction)
    with pytest.raises(ValueError):
        framed_invariants(0, 1, 1)
