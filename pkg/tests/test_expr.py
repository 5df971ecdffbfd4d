import random

import pytest
from hypothesis import given, settings, strategies as st

from global_shuffle import expr
from global_shuffle.curve_ring import LineBundleMonomial as LB, RingElement, euler, make_model
from global_shuffle.invariants import random_tree
from global_shuffle.shuffle import ShuffleElement, kernel_gc, kernel_gc_norm, shuffle_product


def test_euler_node():
    node = expr.parse("e(t*t2/t1*O(Delta(1,2)))")
    assert isinstance(node, expr.Euler)
    assert node.monomial.bundle == LB.make(t=1, slots={1: -1, 2: 1}, diagonals={(1, 2): 1})
    m = make_model(1, 2)
    assert expr.evaluate(node, m) == m.tau + m.u(2) - m.u(1) + m.diagonal_class(1, 2)


def test_symplectic_relation_is_zero():
    m = make_model(1, 1)
    assert expr.evaluate_string("a(1,1)*b(1,1) - pt(1)", m).is_zero()


def test_shuffle_node_dispatch():
    m1 = make_model(1, 1)
    m2 = m1.with_factors(2)
    one = ShuffleElement.make(m1.one())
    assert expr.evaluate_string("sh(1, 1)", m2, parts=(1, 1)) == shuffle_product(one, one, kernel_gc()).value
    value = expr.evaluate_string("sh(u1, pt(1))", m2, kernel=kernel_gc_norm())
    f = ShuffleElement.make(m1.u(1))
    h = ShuffleElement.make(m1.point(1))
    assert value == shuffle_product(f, h, kernel_gc_norm()).value


def test_whitespace_and_aliases():
    a = expr.parse(" u1 *  t2 ^ 2 ")
    b = expr.parse("t1*u2^2")
    assert expr.to_string(a) == expr.to_string(b) == "u1*u2^2"


@pytest.mark.parametrize("src,pos", [("u1 + * 2", 5), ("e(t1", 4), ("pt(1", 4), ("2 +", 3)])
def test_syntax_errors_report_position(src, pos):
    with pytest.raises(expr.ParseError) as info:
        expr.parse(src)
    assert info.value.pos == pos


@pytest.mark.parametrize("src", ["a(1,3)", "u3", "pt(0)", "Delta(1,1)", "Delta", "e(z)", "foo"])
def test_evaluation_errors(src):
    with pytest.raises(expr.EvaluationError):
        expr.evaluate_string(src, make_model(1, 2))


def test_kernel_from_expression_matches_builtin():
    g = expr.kernel_from_expression("e(t/z)*e(z*O(-Delta))*e(t*z*O(Delta))/e(z)")
    for theory in ("additive", "multiplicative"):
        m = make_model(1, 2, theory)
        assert g.pair(m, 1, 2) == kernel_gc().pair(m, 1, 2)


def test_line_bundle_parser():
    assert expr.parse_line_bundle("t*t2^-1") == LB.make(t=1, slots={2: -1})
    with pytest.raises(expr.ParseError):
        expr.parse_line_bundle("z*t1")


def test_ring_element_print_round_trip():
    m = make_model(1, 2, "multiplicative")
    x = euler(m, LB.make(t=1, slots={2: 1, 1: -1}, diagonals={(1, 2): 1})) / (m.u(1) - 3) + m.curve_class("a", 2, 1)
    assert expr.evaluate_string(str(x), m) == x
    assert RingElement.from_json(x.to_json()) == x


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_parse_print_fixed_point(seed):
    tree = random_tree(random.Random(seed))
    text = expr.to_string(tree)
    assert expr.parse(text) == tree
    assert expr.to_string(expr.parse(text)) == text
