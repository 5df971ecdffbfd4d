"""Shuffle algebras A Sh_g with kernel-weighted symmetrisation products."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Sequence

import flint

from .curve_ring import (
    LineBundleMonomial,
    RingElement,
    RingModel,
    embed,
    euler,
    invert,
    is_symmetric,
    permute,
    relocate,
    specialize,
)

LB = LineBundleMonomial

KernelRule = Callable[[RingModel, LineBundleMonomial, tuple[int, int]], RingElement]


class KernelError(ZeroDivisionError):
    """A kernel is undefined (zero scalar denominator) on some slot pair."""


class KernelFunction:
    """A rule g(z) evaluated for a monomial argument ``z`` and a diagonal pair.

    Inside the rule, ``O(Delta)`` means O(Delta_ij) for the pair it is
    evaluated on; for the pair (i, j) of a shuffle product the argument is
    ``z = t_j / t_i``.
    """

    def __init__(self, name: str, rule: KernelRule):
        self.name = name
        self._rule = rule
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"KernelFunction({self.name})"

    def at(self, model: RingModel, z: LineBundleMonomial, pair: tuple[int, int]) -> RingElement:
        key = (model, z, pair)
        if key not in self._cache:
            try:
                self._cache[key] = self._rule(model, z, pair)
            except ZeroDivisionError as exc:
                raise KernelError(f"kernel {self.name} undefined at z={z}, pair={pair}: {exc}") from exc
        return self._cache[key]

    def pair(self, model: RingModel, i: int, j: int) -> RingElement:
        """g(t_j / t_i) with Delta = Delta_ij (1-based slots)."""
        return self.at(model, slot_ratio(i, j), (i, j))


def slot_ratio(i: int, j: int) -> LineBundleMonomial:
    """The character t_j / t_i."""
    return LB.make(slots={j: 1, i: -1})


def _diag(pair: tuple[int, int], e: int = 1) -> LineBundleMonomial:
    return LB.make(diagonals={pair: e})


T = LB.make(t=1)


def _gc_rule(model: RingModel, z: LineBundleMonomial, pair: tuple[int, int]) -> RingElement:
    num = (
        euler(model, T * z.inverse())
        * euler(model, z * _diag(pair, -1))
        * euler(model, T * z * _diag(pair))
    )
    return num * invert(euler(model, z))


def _gc_norm_rule(model: RingModel, z: LineBundleMonomial, pair: tuple[int, int]) -> RingElement:
    num = euler(model, z * _diag(pair, -1)) * euler(model, T * z * _diag(pair))
    return num * invert(euler(model, z) * euler(model, T * z))


def kernel_gc(model: RingModel | None = None) -> KernelFunction:
    """g_C = e(t z^-1) e(z O(-Delta)) e(t z O(Delta)) / e(z)."""
    return _KERNELS["gc"]


def kernel_gc_norm(model: RingModel | None = None) -> KernelFunction:
    """g_C^norm = e(z O(-Delta)) e(t z O(Delta)) / (e(z) e(t z))."""
    return _KERNELS["gcnorm"]


def trivial_kernel() -> KernelFunction:
    return _KERNELS["one"]


_KERNELS = {
    "gc": KernelFunction("gc", _gc_rule),
    "gcnorm": KernelFunction("gcnorm", _gc_norm_rule),
    "one": KernelFunction("one", lambda model, z, pair: model.one()),
}


def kernel_by_name(name: str) -> KernelFunction:
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; expected one of {sorted(_KERNELS)}") from None


# -- compositions and kernel blocks ------------------------------------------


def block_of(parts: Sequence[int]) -> list[int]:
    """Block index of every slot (0-based slots)."""
    out = []
    for b, size in enumerate(parts):
        if size < 0:
            raise ValueError(f"negative part in composition {tuple(parts)}")
        out.extend([b] * size)
    return out


def cross_pairs(parts: Sequence[int]) -> list[tuple[int, int]]:
    """1-based pairs (i, j) with i in an earlier block than j."""
    blocks = block_of(parts)
    d = len(blocks)
    return [(i + 1, j + 1) for i in range(d) for j in range(i + 1, d) if blocks[i] < blocks[j]]


def kernel_block(g: KernelFunction, parts: Sequence[int], model: RingModel) -> RingElement:
    """Product of g(t_j / t_i) over slot pairs lying in different blocks, i's block first."""
    if sum(parts) != model.factors:
        raise ValueError(f"composition {tuple(parts)} does not sum to {model.factors}")
    out = model.one()
    for i, j in cross_pairs(parts):
        out = out * g.pair(model, i, j)
    return out


# -- shuffle elements ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ShuffleElement:
    value: RingElement
    symmetric: bool | None = None

    @property
    def degree(self) -> int:
        return self.value.model.factors

    @property
    def model(self) -> RingModel:
        return self.value.model

    @classmethod
    def make(cls, value: RingElement, check: bool = True) -> "ShuffleElement":
        if check:
            if not is_symmetric(value):
                raise ValueError(f"degree-{value.model.factors} value is not S_d-symmetric: {value}")
            return cls(value, True)
        return cls(value, None)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(self.value)

    def __add__(self, other: "ShuffleElement") -> "ShuffleElement":
        return ShuffleElement(self.value + other.value, _and(self.symmetric, other.symmetric))

    def __sub__(self, other: "ShuffleElement") -> "ShuffleElement":
        return ShuffleElement(self.value - other.value, _and(self.symmetric, other.symmetric))

    def __neg__(self) -> "ShuffleElement":
        return ShuffleElement(-self.value, self.symmetric)

    def scale(self, c) -> "ShuffleElement":
        return ShuffleElement(self.value * c, self.symmetric)

    def __str__(self) -> str:
        return f"[deg {self.degree}] {self.value}"

    def to_json(self) -> dict:
        out = self.value.to_json()
        out["degree"] = self.degree
        out["symmetric"] = bool(self.symmetric)
        return out

    @classmethod
    def from_json(cls, data) -> "ShuffleElement":
        value = RingElement.from_json(data)
        if value.model.factors != data["degree"]:
            raise ValueError("degree does not match the number of factors")
        return cls.make(value, check=bool(data.get("symmetric", False)))


def _and(a, b):
    return True if (a and b) else None


def shuffle_cosets(d1: int, d2: int) -> list[tuple[int, ...]]:
    """Minimal coset representatives Sh(d1, d2), as 0-based image tuples.

    sigma is increasing on {0..d1-1} and on {d1..d-1}; it is determined by the
    sorted image of the first block.
    """
    d = d1 + d2
    out = []
    for first in combinations(range(d), d1):
        rest = [k for k in range(d) if k not in first]
        out.append(tuple(first) + tuple(rest))
    assert len(out) == comb(d, d1)
    return out


def _sum(elements, model: RingModel) -> RingElement:
    total = model.zero()
    for x in elements:
        total = total + x
    return total


def shuffle_product(f: ShuffleElement, h: ShuffleElement, g: KernelFunction, jobs: int = 1) -> ShuffleElement:
    """Xi(f, h) = sum over Sh(d1, d2) of sigma.(g_{d1,d2} * f(slots 1..d1) * h(slots d1+1..d))."""
    mf, mh = f.model, h.model
    if (mf.genus, mf.fgl, mf.extra_vars) != (mh.genus, mh.fgl, mh.extra_vars):
        raise ValueError("shuffle factors live in incompatible models")
    d1, d2 = f.degree, h.degree
    model = mf.with_factors(d1 + d2)
    base = embed(f.value, model, range(d1)) * embed(h.value, model, range(d1, d1 + d2))
    base = kernel_block(g, (d1, d2), model) * base
    cosets = shuffle_cosets(d1, d2)
    if jobs > 1 and len(cosets) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            images = list(pool.map(lambda s: permute(s, base), cosets))
    else:
        images = [permute(s, base) for s in cosets]
    return ShuffleElement(_sum(images, model), True)


# -- nested products and exact pointwise evaluation ----------------------------


@dataclass(frozen=True, eq=False)
class ShuffleTree:
    """An unevaluated product Xi(left, right); leaves are ShuffleElements."""

    left: "ShuffleTree | ShuffleElement"
    right: "ShuffleTree | ShuffleElement"
    kernel: KernelFunction

    @property
    def degree(self) -> int:
        return self.left.degree + self.right.degree

    @property
    def model(self) -> RingModel:
        return self.left.model.with_factors(self.degree)


def evaluate_tree(node, jobs: int = 1) -> ShuffleElement:
    """Compute a nested product symbolically."""
    if isinstance(node, ShuffleElement):
        return node
    return shuffle_product(evaluate_tree(node.left, jobs), evaluate_tree(node.right, jobs), node.kernel, jobs)


def evaluate_tree_at(node, us: Sequence, fixed: dict) -> RingElement:
    """The value of a nested product with u_k specialised to ``us[k-1]``.

    ``fixed`` assigns t and any other coefficient variables.  Specialisation
    is a ring homomorphism and sigma.F at a point is F at the permuted point,
    so the symmetrisation can be carried out on rational numbers; nothing is
    approximated.
    """
    model = node.model
    field = model.field
    values = _numeric_tree(node, list(us), dict(fixed))
    return RingElement(model, {m: field.constant(_fraction(c)) for m, c in values.items()})


def _numeric_tree(node, us: list, fixed: dict) -> dict:
    """Recursive worker of :func:`evaluate_tree_at` on ``{monomial: fmpq}`` dicts."""
    if isinstance(node, ShuffleElement):
        return _numeric(specialize(node.value, {**fixed, **_u_values(us)}))
    d1, d2 = node.left.degree, node.right.degree
    model = node.model
    lmodel, rmodel = node.left.model, node.right.model
    first, second = tuple(range(d1)), tuple(range(d1, d1 + d2))
    pairs = cross_pairs((d1, d2))
    total: dict = {}
    for sigma in shuffle_cosets(d1, d2):
        p = [us[k] for k in sigma]
        values = {**fixed, **_u_values(p)}
        left = _numeric_relocate(lmodel, _numeric_tree(node.left, p[:d1], fixed), first, d1 + d2)
        right = _numeric_relocate(rmodel, _numeric_tree(node.right, p[d1:], fixed), second, d1 + d2)
        base = _numeric_mul(model, left, right)
        # each pair factor is small, so multiplying them in one at a time stays cheap
        for i, j in pairs:
            base = _numeric_mul(model, _numeric(specialize(node.kernel.pair(model, i, j), values)), base)
        for mono, c in _numeric_relocate(model, base, sigma, d1 + d2).items():
            prev = total.get(mono)
            total[mono] = c if prev is None else prev + c
    return {m: c for m, c in total.items() if c != 0}


def _numeric(x: RingElement) -> dict:
    return {m: c.num.leading_coefficient() if not c.is_zero() else flint.fmpq(0) for m, c in x.terms.items()}


def _fraction(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def _numeric_mul(model: RingModel, x: dict, y: dict) -> dict:
    cache = model._mul_cache
    product = model.monomial_product
    out: dict = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            key = (m1, m2)
            pr = cache[key] if key in cache else product(m1, m2)
            if pr is None:
                continue
            sign, m = pr
            c = c1 * c2 if sign > 0 else -(c1 * c2)
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
    return out


def _numeric_relocate(source: RingModel, x: dict, slots: Sequence[int], factors: int) -> dict:
    out = {}
    for mono, c in x.items():
        sign, new = relocate(source, mono, slots, factors)
        out[new] = c if sign > 0 else -c
    return out


def _u_values(us: Sequence) -> dict:
    return {f"u{k + 1}": v for k, v in enumerate(us)}


def random_point(model: RingModel, rng, size: int = 10**9) -> tuple[list, dict]:
    """Distinct random integers for u_1..u_d and random values for every other variable."""
    us = rng.sample(range(-size, size), model.factors)
    fixed = {name: rng.randrange(-size, size) for name in model.field.names if not _is_u(name)}
    return us, fixed


def _is_u(name: str) -> bool:
    return name.startswith("u") and name[1:].isdigit()


# -- renormalisation ---------------------------------------------------------


def rn_factor(model: RingModel) -> RingElement:
    """prod over ordered pairs i != j of e(t t_j / t_i)."""
    out = model.one()
    d = model.factors
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            if i != j:
                out = out * euler(model, T * slot_ratio(i, j))
    return out


def rn_map(f: ShuffleElement) -> ShuffleElement:
    return ShuffleElement(rn_factor(f.model) * f.value, f.symmetric)


def rn_inverse(f: ShuffleElement) -> ShuffleElement:
    return ShuffleElement(invert(rn_factor(f.model)) * f.value, f.symmetric)


# -- the genus relation -------------------------------------------------------


def genus_generator(model1: RingModel, k: int, reading: str = "dual") -> RingElement:
    """e_k in degree 1.

    ``dual``: e(t_1^{-1})^k, the coefficient of e(z)^{-k} in
    E(z) = sum_i e(t_1^{-1})^{-i} e(z)^i.  ``direct``: u_1^k.
    """
    if reading == "dual":
        base = euler(model1, LB.make(slots={1: -1}))
    elif reading == "direct":
        base = model1.u(1)
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return base ** k


@dataclass
class RelationResult:
    holds: bool
    residual: RingElement

    def __bool__(self) -> bool:
        return self.holds


def verify_genus_relation(i: int, j: int, model: RingModel, reading: str = "dual", jobs: int = 1) -> RelationResult:
    """[e_i,e_j]_3 - (t^2 + D(t+D)) [e_i,e_j]_1 + t D (t+D) (e_i e_j + e_j e_i) with D = Delta_12."""
    if model.fgl.preset != "additive":
        raise ValueError("the genus relation is stated for the additive theory")
    m1 = model.with_factors(1)
    m2 = model.with_factors(2)
    g = kernel_gc_norm()
    gens: dict[int, ShuffleElement] = {}
    prods: dict[tuple[int, int], RingElement] = {}

    def e(k: int) -> ShuffleElement:
        if k not in gens:
            gens[k] = ShuffleElement(genus_generator(m1, k, reading), True)
        return gens[k]

    def ee(a: int, b: int) -> RingElement:
        if (a, b) not in prods:
            prods[(a, b)] = shuffle_product(e(a), e(b), g, jobs).value
        return prods[(a, b)]

    def bracket(n: int) -> RingElement:
        total = m2.zero()
        for k in range(n + 1):
            c = (-1) ** k * comb(n, k)
            total = total + (ee(i + k, j + n - k) - ee(j + n - k, i + k)) * c
        return total

    tau = m2.tau
    delta = m2.diagonal_class(1, 2)
    dd = delta * (tau + delta)
    residual = bracket(3) - (tau * tau + dd) * bracket(1) + tau * dd * (ee(i, j) + ee(j, i))
    return RelationResult(residual.is_zero(), residual)
