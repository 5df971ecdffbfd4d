"""The shuffle kernel from localization weights on Quot schemes.

At the torus-fixed locus C^d the tangent spaces of the Quot schemes split
into equivariant line bundles (t_i/t_j) O(-Delta_ij).  Comparing Euler
classes of these weight multisets with the induction factor of the parabolic
reduction recovers g_C block by block; nothing about the Quot schemes beyond
their weight data is used.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .curve_ring import LineBundleMonomial, RingElement, RingModel, euler, invert
from .shuffle import kernel_block, kernel_gc, kernel_gc_norm

LB = LineBundleMonomial

Pair = tuple[int, int]


@dataclass(frozen=True)
class Composition:
    """Block sizes d_i - d_{i-1} of a flag 0 = d_0 <= d_1 <= ... <= d_k = d."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p <= 0 for p in parts):
            raise ValueError(f"composition parts must be positive, got {self.parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_cumulative(cls, cumulative: Sequence[int]) -> "Composition":
        if not cumulative or cumulative[0] != 0:
            raise ValueError("a flag starts at d_0 = 0")
        return cls(tuple(b - a for a, b in zip(cumulative, cumulative[1:])))

    @property
    def cumulative(self) -> tuple[int, ...]:
        out = [0]
        for p in self.parts:
            out.append(out[-1] + p)
        return tuple(out)

    @property
    def degree(self) -> int:
        return sum(self.parts)

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def _composition(c) -> Composition:
    return c if isinstance(c, Composition) else Composition(tuple(c))


def index_sets(c) -> tuple[frozenset[Pair], frozenset[Pair]]:
    """(T_p, T_n): unions of [d_{i-1}+1, d_i] x [d_{i-1}+1, d] and x [d_i+1, d]."""
    c = _composition(c)
    cum, d = c.cumulative, c.degree
    tp: set[Pair] = set()
    tn: set[Pair] = set()
    for lo, hi in zip(cum, cum[1:]):
        for i in range(lo + 1, hi + 1):
            tp.update((i, j) for j in range(lo + 1, d + 1))
            tn.update((i, j) for j in range(hi + 1, d + 1))
    return frozenset(tp), frozenset(tn)


@dataclass(frozen=True)
class Weight:
    monomial: LineBundleMonomial
    pair: Pair
    role: str

    def __str__(self) -> str:
        return str(self.monomial)


class WeightList:
    """A multiset of tagged line-bundle weights."""

    def __init__(self, weights: Iterable[Weight] = ()):
        self.weights = tuple(weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightList):
            return NotImplemented
        return Counter(self.weights) == Counter(other.weights)

    def __hash__(self) -> int:
        return hash(frozenset(Counter(self.weights).items()))

    def monomials(self) -> Counter:
        return Counter(w.monomial for w in self.weights)

    def to_json(self) -> list[str]:
        return sorted(str(w) for w in self.weights)

    def __repr__(self) -> str:
        return f"WeightList({self.to_json()})"


def _ratio(i: int, j: int) -> LineBundleMonomial:
    """t_i / t_j."""
    return LB.make(slots={i: 1, j: -1})


def _diag(i: int, j: int, e: int) -> LineBundleMonomial:
    return LB.make(diagonals={(i, j): e})


T = LB.make(t=1)


def tangent_weights(c) -> tuple[WeightList, WeightList, WeightList]:
    """(T Quot°, T Quot~, (T Quot~)^{nilp,*}) restricted to C^d."""
    c = _composition(c)
    d = c.degree
    tp, tn = index_sets(c)
    pairs = [(i, j) for i in range(1, d + 1) for j in range(1, d + 1) if i != j]
    full = WeightList(Weight(_ratio(i, j) * _diag(i, j, -1), (i, j), "tangent") for i, j in pairs)
    filtered = WeightList(
        Weight(_ratio(i, j) * _diag(i, j, -1), (i, j), "parabolic") for i, j in pairs if (i, j) in tp
    )
    nilp_dual = WeightList(Weight(T * _ratio(j, i) * _diag(i, j, 1), (i, j), "nilpotent-dual") for i, j in sorted(tn))
    return full, filtered, nilp_dual


def negative_nilradical(c) -> WeightList:
    """The weights t_j / t_i of n_-, one for each pair of T_n."""
    _, tn = index_sets(c)
    return WeightList(Weight(_ratio(j, i), (i, j), "nilradical") for i, j in sorted(tn))


def _euler_product(model: RingModel, monomials: Counter) -> RingElement:
    out = model.one()
    for m, mult in sorted(monomials.items(), key=lambda item: str(item[0])):
        out = out * euler(model, m) ** mult
    return out


def _check(c: Composition, model: RingModel) -> None:
    if c.degree != model.factors:
        raise ValueError(f"composition {c} does not have degree {model.factors}")


def induction_factor(c, model: RingModel) -> RingElement:
    """prod over T_n of e(t t_i / t_j)."""
    c = _composition(c)
    _check(c, model)
    _, tn = index_sets(c)
    return _euler_product(model, Counter(T * _ratio(i, j) for i, j in tn))


def pushpull_factor(c, model: RingModel) -> RingElement:
    """e(n_-)^{-1} e((T Quot~)^{nilp,*}) e(T Quot~)^{-1} e(T Quot°).

    The weight multisets are cancelled against each other before any Euler
    class is inverted, so only the genuinely new denominators remain.
    """
    c = _composition(c)
    _check(c, model)
    full, filtered, nilp_dual = tangent_weights(c)
    num = full.monomials() + nilp_dual.monomials()
    den = filtered.monomials() + negative_nilradical(c).monomials()
    common = num & den
    num, den = num - common, den - common
    return _euler_product(model, num) * invert(_euler_product(model, den))


def derived_kernel(c, model: RingModel) -> RingElement:
    """induction_factor * pushpull_factor."""
    return induction_factor(c, model) * pushpull_factor(c, model)


def normalised_derived_kernel(c, model: RingModel) -> RingElement:
    """pushpull_factor divided by prod over T_n of e(t t_j / t_i)."""
    c = _composition(c)
    _check(c, model)
    _, tn = index_sets(c)
    return pushpull_factor(c, model) * invert(_euler_product(model, Counter(T * _ratio(j, i) for i, j in tn)))


@dataclass
class KernelComparison:
    equal: bool
    derived: RingElement
    closed_form: RingElement

    def __bool__(self) -> bool:
        return self.equal


def compare_kernel(c, model: RingModel, normalised: bool = False) -> KernelComparison:
    """Localization side against kernel_block of g_C (or g_C^norm)."""
    c = _composition(c)
    if normalised:
        derived = normalised_derived_kernel(c, model)
        closed = kernel_block(kernel_gc_norm(), c.parts, model)
    else:
        derived = derived_kernel(c, model)
        closed = kernel_block(kernel_gc(), c.parts, model)
    return KernelComparison(derived == closed, derived, closed)


def compositions(d: int) -> list[Composition]:
    """All compositions of d into positive parts."""
    if d == 0:
        return []
    out = []

    def build(rest: int, acc: tuple[int, ...]):
        if rest == 0:
            out.append(Composition(acc))
            return
        for p in range(1, rest + 1):
            build(rest - p, acc + (p,))

    build(d, ())
    return out
