"""Bi-infinite series through delta distributions.

The series ``E_L(z) = sum_i e(L)^{-i} e(z)^i`` is the delta distribution
pinning ``Z = e(z)`` to ``e(L)``.  A :class:`DistributionSeries` is a finite
sum of such pinnings with closed-form weights; the change-of-variables rule
``delta(w/z) f(z) = delta(w/z) f(w)`` turns multiplication by a function of
Z, W into an evaluation at the pinned values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .curve_ring import (
    LineBundleMonomial,
    NonInvertibleError,
    RingElement,
    RingModel,
    embed,
    euler,
    make_model,
    permute,
    substitute,
)
from .shuffle import KernelFunction, kernel_block, shuffle_cosets

LB = LineBundleMonomial

#: the adjoined formal symbols Z = e(z) and W = e(w)
SYMBOLS = ("Z", "W")

Support = tuple[tuple[str, RingElement], ...]


class DistributionError(ValueError):
    """Ill-formed distribution or an evaluation outside the domain."""


@dataclass(frozen=True)
class Component:
    support: Support
    weight: RingElement

    @property
    def pinned(self) -> dict[str, RingElement]:
        return dict(self.support)

    def __str__(self) -> str:
        pins = ", ".join(f"{v} -> {value}" for v, value in self.support)
        return f"delta({pins}) * [{self.weight}]"


class DistributionSeries:
    """Canonical finite sum of delta components (plus an optional delta-free tail)."""

    def __init__(self, model: RingModel, variables: Iterable[str], components: Iterable[Component] = (),
                 tail: RingElement | None = None):
        self.model = model
        self.variables = tuple(sorted(set(variables)))
        for v in self.variables:
            if v not in SYMBOLS:
                raise DistributionError(f"{v!r} is not one of the series symbols {SYMBOLS}")
            if v not in model.extra_vars:
                raise DistributionError(f"model does not adjoin the symbol {v!r}")
        merged: dict[tuple, Component] = {}
        for comp in components:
            names = [v for v, _ in comp.support]
            if len(set(names)) != len(names):
                raise DistributionError(f"component pins a variable twice: {names}")
            support = tuple(sorted(comp.support, key=lambda item: item[0]))
            key = tuple((v, value) for v, value in support)
            if key in merged:
                merged[key] = Component(support, merged[key].weight + comp.weight)
            else:
                merged[key] = Component(support, comp.weight)
        self.components = tuple(
            sorted((c for c in merged.values() if not c.weight.is_zero()), key=_component_key)
        )
        self.tail = tail if tail is not None and not tail.is_zero() else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistributionSeries):
            return NotImplemented
        return (
            self.model == other.model
            and self.variables == other.variables
            and self.components == other.components
            and self.tail == other.tail
        )

    def __hash__(self) -> int:
        return hash((self.model, self.variables, self.components))

    def is_zero(self) -> bool:
        return not self.components and self.tail is None

    def __neg__(self) -> "DistributionSeries":
        tail = -self.tail if self.tail is not None else None
        return DistributionSeries(
            self.model, self.variables, [Component(c.support, -c.weight) for c in self.components], tail
        )

    def __add__(self, other: "DistributionSeries") -> "DistributionSeries":
        if self.model != other.model:
            raise DistributionError("distributions live in different models")
        tail = _add_optional(self.tail, other.tail)
        return DistributionSeries(
            self.model, self.variables + other.variables, self.components + other.components, tail
        )

    def __sub__(self, other: "DistributionSeries") -> "DistributionSeries":
        return self + (-other)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = [str(c) for c in self.components]
        if self.tail is not None:
            parts.append(f"[{self.tail}]")
        return " + ".join(parts)

    def to_json(self) -> dict:
        out = {
            "variables": list(self.variables),
            "components": [
                {
                    "support": {v: value.to_json() for v, value in c.support},
                    "weight": c.weight.to_json(),
                }
                for c in self.components
            ],
        }
        if self.tail is not None:
            out["tail"] = self.tail.to_json()
        return out


def _component_key(c: Component):
    return tuple((v, str(value)) for v, value in c.support)


def _add_optional(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def series_model(genus: int, factors: int, theory="additive") -> RingModel:
    """A model adjoining the series symbols Z and W."""
    return make_model(genus, factors, theory, SYMBOLS)


def home_slot(L: LineBundleMonomial, slot: int) -> LineBundleMonomial:
    """Read ``L`` relative to the slot of the series it labels.

    ``L`` may mention at most one slot character (e.g. t_2^{-1}); that slot is
    moved to ``slot``.
    """
    if L.diagonals:
        raise DistributionError(f"{L} involves a diagonal; only t and one slot character are allowed")
    slots = {k for k, _ in L.slots}
    if len(slots) > 1:
        raise DistributionError(f"{L} mentions several slots")
    if not slots:
        return L
    return L.relabel({slots.pop(): slot})


def e_series(L: LineBundleMonomial, var: str, model: RingModel | None = None, genus: int = 0,
             theory="additive") -> DistributionSeries:
    """E_L in the variable ``var``: one delta pinning ``var`` to e(L), unit weight."""
    if model is None:
        model = series_model(genus, 1, theory)
    if model.factors == 1:
        L = home_slot(L, 1)
    value = euler(model, L)
    if value.scalar_part().is_zero():
        raise NonInvertibleError(f"e({L}) = {value} has a non-invertible scalar part")
    return DistributionSeries(model, [var], [Component(((var, value),), model.one())])


def dist_scale(s: DistributionSeries, h: RingElement) -> DistributionSeries:
    """Multiply by a function ``h`` of the series symbols, through the change of variables."""
    if h.model != s.model:
        raise DistributionError("scaling function lives in a different model")
    if s.tail is not None:
        raise DistributionError("a delta-free tail cannot be scaled by a function of the symbols")
    out = []
    for comp in s.components:
        value = h
        for v, pinned in comp.support:
            try:
                value = substitute(value, v, pinned)
            except NonInvertibleError as exc:
                raise NonInvertibleError(f"at component {comp}: {exc}") from exc
        loose = [v for v in SYMBOLS if _depends(value, v)]
        if loose:
            raise DistributionError(f"component {comp} does not pin {loose}")
        out.append(Component(comp.support, comp.weight * value))
    return DistributionSeries(s.model, s.variables, out)


def _depends(x: RingElement, var: str) -> bool:
    return any(c.depends_on(var) for c in x.terms.values())


def dist_shuffle(s1: DistributionSeries, s2: DistributionSeries, g: KernelFunction) -> DistributionSeries:
    """The shuffle product of two series, carried out on their delta components."""
    m1, m2 = s1.model, s2.model
    if (m1.genus, m1.fgl, m1.extra_vars) != (m2.genus, m2.fgl, m2.extra_vars):
        raise DistributionError("series live in incompatible models")
    if s1.tail is not None or s2.tail is not None:
        raise DistributionError("shuffle of delta-free tails is not supported")
    d1, d2 = m1.factors, m2.factors
    model = m1.with_factors(d1 + d2)
    first, second = range(d1), range(d1, d1 + d2)
    kernel = kernel_block(g, (d1, d2), model)
    out = []
    for c1 in s1.components:
        for c2 in s2.components:
            clash = set(c1.pinned) & set(c2.pinned)
            if clash:
                raise DistributionError(f"product of two deltas in the same variable {sorted(clash)}")
            support = [(v, embed(x, model, first)) for v, x in c1.support]
            support += [(v, embed(x, model, second)) for v, x in c2.support]
            base = kernel * embed(c1.weight, model, first) * embed(c2.weight, model, second)
            for sigma in shuffle_cosets(d1, d2):
                out.append(Component(
                    tuple((v, permute(sigma, x)) for v, x in support),
                    permute(sigma, base),
                ))
    return DistributionSeries(model, s1.variables + s2.variables, out)


def shuffle_e_product(L1: LineBundleMonomial, L2: LineBundleMonomial, g: KernelFunction,
                      genus: int = 0, theory="additive", variables: Sequence[str] = ("Z", "W")) -> DistributionSeries:
    """E_{L1}(z) E_{L2}(w) at the distribution level."""
    m1 = series_model(genus, 1, theory)
    z, w = variables
    return dist_shuffle(e_series(L1, z, m1), e_series(L2, w, m1), g)


@dataclass
class QuadraticResult:
    holds: bool
    lhs: DistributionSeries
    rhs: DistributionSeries
    residual: DistributionSeries

    def __bool__(self) -> bool:
        return self.holds


def kernel_argument(L1: LineBundleMonomial, L2: LineBundleMonomial) -> LineBundleMonomial:
    """t_1 L_1 w / (t_2 L_2 z), with L_1 read in slot 1 and L_2 in slot 2."""
    return (
        LB.make(slots={1: 1}) * home_slot(L1, 1) * LB.make(extras={"W": 1})
        / (LB.make(slots={2: 1}) * home_slot(L2, 2) * LB.make(extras={"Z": 1}))
    )


def verify_quadratic(L1: LineBundleMonomial, L2: LineBundleMonomial, g: KernelFunction, genus: int = 0,
                     theory="additive") -> QuadraticResult:
    """g(t1 L1 w / t2 L2 z) E_{L1}(z) E_{L2}(w) - g(t2 L2 z / t1 L1 w) E_{L2}(w) E_{L1}(z)."""
    m1 = series_model(genus, 1, theory)
    m2 = m1.with_factors(2)
    ez = e_series(L1, "Z", m1)
    ew = e_series(L2, "W", m1)
    arg = kernel_argument(L1, L2)
    lhs = dist_scale(dist_shuffle(ez, ew, g), g.at(m2, arg, (1, 2)))
    rhs = dist_scale(dist_shuffle(ew, ez, g), g.at(m2, arg.inverse(), (1, 2)))
    residual = lhs - rhs
    return QuadraticResult(residual.is_zero(), lhs, rhs, residual)
