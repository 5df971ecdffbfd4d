"""Localized equivariant cohomology of C^d with a formal group law.

Each factor of C^d contributes the cohomology of a genus-g curve with the
symplectic basis ``1, a_1..a_g, b_1..b_g, pt`` where ``a_i * b_i = pt``.  An
element of the ring is a finite sum of basis monomials (one generator per
factor, written in factor order) with coefficients in the rational function
field Q(t, u_1..u_d, extra variables, law symbols); ``u_k = e(t_k)`` and
``t = e(t)`` are the equivariant parameters.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from functools import cached_property, reduce
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .fgl import FormalGroupLaw, parse_theory
from .ratfunc import FunctionField, NonInvertibleError, RationalFunction, _as_fmpq, function_field

Monomial = tuple[int, ...]

__all__ = [
    "LineBundleMonomial",
    "NonInvertibleError",
    "RingElement",
    "RingModel",
    "diagonal_transfer_holds",
    "embed",
    "euler",
    "invert",
    "is_symmetric",
    "make_model",
    "permute",
    "specialize",
    "substitute",
    "symmetrize",
]


def _slot_var(k: int) -> str:
    return f"u{k}"


@dataclass(frozen=True)
class RingModel:
    genus: int
    factors: int
    fgl: FormalGroupLaw
    extra_vars: tuple[str, ...] = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if self.factors < 0:
            raise ValueError("number of factors must be non-negative")
        object.__setattr__(self, "extra_vars", tuple(self.extra_vars))
        reserved = {"t"} | {_slot_var(k) for k in range(1, self.factors + 1)}
        clash = reserved & set(self.extra_vars)
        if clash:
            raise ValueError(f"extra variables clash with reserved names: {sorted(clash)}")

    # -- curve basis ----------------------------------------------------

    @property
    def point_index(self) -> int:
        return 2 * self.genus + 1

    def generator_degree(self, gen: int) -> int:
        if gen == 0:
            return 0
        if gen == self.point_index:
            return 2
        return 1

    def generator_name(self, gen: int, factor: int) -> str:
        g = self.genus
        if gen == self.point_index:
            return f"pt({factor})"
        if 1 <= gen <= g:
            return f"a({factor},{gen})"
        return f"b({factor},{gen - g})"

    @cached_property
    def basis(self) -> list[Monomial]:
        per_factor = range(2 * self.genus + 2)
        return sorted(product(per_factor, repeat=self.factors))

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(self.generator_degree(x) for x in mono)

    def monomial_name(self, mono: Monomial) -> str:
        parts = [self.generator_name(x, k + 1) for k, x in enumerate(mono) if x]
        return "*".join(parts) if parts else "1"

    def _factor_product(self, x: int, y: int):
        if x == 0:
            return 1, y
        if y == 0:
            return 1, x
        g = self.genus
        if 1 <= x <= g and y == x + g:
            return 1, self.point_index
        if 1 <= y <= g and x == y + g:
            return -1, self.point_index
        return None

    @cached_property
    def _mul_cache(self) -> dict:
        return {}

    @cached_property
    def _relocate_cache(self) -> dict:
        return {}

    def monomial_product(self, x: Monomial, y: Monomial):
        """Return ``(sign, monomial)`` for x*y, or None when the product vanishes."""
        key = (x, y)
        cache = self._mul_cache
        if key in cache:
            return cache[key]
        sign = 1
        out = []
        result = None
        for k in range(self.factors):
            pr = self._factor_product(x[k], y[k])
            if pr is None:
                break
            sign *= pr[0]
            out.append(pr[1])
        else:
            # Koszul sign from moving y_k left past x_{k+1}, ..., x_d
            odd_after = 0
            for k in range(self.factors - 1, -1, -1):
                if self.generator_degree(y[k]) % 2 and odd_after % 2:
                    sign = -sign
                odd_after += self.generator_degree(x[k]) % 2
            result = (sign, tuple(out))
        cache[key] = result
        return result

    # -- coefficient field --------------------------------------------

    @cached_property
    def field(self) -> FunctionField:
        names = ("t",) + tuple(_slot_var(k) for k in range(1, self.factors + 1))
        return function_field(names + self.extra_vars + self.fgl.beta_names)

    @property
    def theory(self) -> str:
        return self.fgl.name

    @cached_property
    def unit_monomial(self) -> Monomial:
        return (0,) * self.factors

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return self.scalar(1)

    def scalar(self, value) -> "RingElement":
        if not isinstance(value, RationalFunction):
            value = self.field.constant(value)
        return RingElement(self, {self.unit_monomial: value} if value else {})

    def var(self, name: str) -> "RingElement":
        """The scalar element given by a coefficient variable (``t``, ``u3``, ``Z``...)."""
        return self.scalar(self.field.gen(name))

    def u(self, k: int) -> "RingElement":
        self._check_factor(k)
        return self.var(_slot_var(k))

    @property
    def tau(self) -> "RingElement":
        return self.var("t")

    def _check_factor(self, k: int) -> None:
        if not 1 <= k <= self.factors:
            raise IndexError(f"factor index {k} out of range 1..{self.factors}")

    def curve_class(self, kind: str, factor: int, index: int = 1) -> "RingElement":
        """``kind`` is ``a``, ``b`` or ``pt``; ``factor`` and ``index`` are 1-based."""
        self._check_factor(factor)
        if kind == "pt":
            gen = self.point_index
        elif kind in ("a", "b"):
            if not 1 <= index <= self.genus:
                raise IndexError(f"{kind}-class index {index} out of range 1..{self.genus}")
            gen = index if kind == "a" else index + self.genus
        else:
            raise ValueError(f"unknown curve class {kind!r}")
        mono = list(self.unit_monomial)
        mono[factor - 1] = gen
        return RingElement(self, {tuple(mono): self.field.one()})

    def point(self, factor: int) -> "RingElement":
        return self.curve_class("pt", factor)

    @cached_property
    def _diagonal_signs(self) -> tuple[int, int]:
        return find_diagonal_signs()

    def diagonal_class(self, k: int, l: int) -> "RingElement":
        """Kunneth expansion of the class of the diagonal pulled back along p_kl."""
        self._check_factor(k)
        self._check_factor(l)
        if k == l:
            raise ValueError("diagonal class needs two distinct factors")
        return _diagonal(self, k, l, self._diagonal_signs)

    def euler(self, m: "LineBundleMonomial") -> "RingElement":
        return euler(self, m)

    def with_factors(self, d: int) -> "RingModel":
        return RingModel(self.genus, d, self.fgl, self.extra_vars)

    def with_extra(self, extra: Sequence[str]) -> "RingModel":
        return RingModel(self.genus, self.factors, self.fgl, tuple(extra))


def make_model(genus: int, factors: int, fgl: FormalGroupLaw | str = "additive", extra_vars: Sequence[str] = ()) -> RingModel:
    if isinstance(fgl, str):
        fgl = parse_theory(fgl)
    return RingModel(genus, factors, fgl, tuple(extra_vars))


class RingElement:
    """Immutable element of the localized ring of a :class:`RingModel`."""

    __slots__ = ("model", "terms")

    def __init__(self, model: RingModel, terms: Mapping[Monomial, RationalFunction]):
        self.model = model
        self.terms = {m: c for m, c in terms.items() if c}

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def scalar_part(self) -> RationalFunction:
        return self.terms.get(self.model.unit_monomial, self.model.field.zero())

    def nilpotent_part(self) -> "RingElement":
        unit = self.model.unit_monomial
        return RingElement(self.model, {m: c for m, c in self.terms.items() if m != unit})

    def is_scalar(self) -> bool:
        return all(m == self.model.unit_monomial for m in self.terms)

    def coefficient(self, mono: Monomial) -> RationalFunction:
        return self.terms.get(tuple(mono), self.model.field.zero())

    def canonical_terms(self) -> list[tuple[Monomial, RationalFunction]]:
        return sorted(self.terms.items())

    # -- arithmetic ---------------------------------------------------

    def _lift(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.model != self.model:
                raise ValueError(f"model mismatch: {self.model} vs {other.model}")
            return other
        return self.model.scalar(other)

    def __add__(self, other) -> "RingElement":
        other = self._lift(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return RingElement(self.model, terms)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement(self.model, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "RingElement":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RingElement":
        return self._lift(other) - self

    def __mul__(self, other) -> "RingElement":
        if not isinstance(other, RingElement):
            if isinstance(other, RationalFunction):
                return RingElement(self.model, {m: c * other for m, c in self.terms.items()})
            return RingElement(self.model, {m: c * other for m, c in self.terms.items()})
        other = self._lift(other)
        model = self.model
        cache = model._mul_cache
        product = model.monomial_product
        out: dict[Monomial, RationalFunction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = (m1, m2)
                pr = cache[key] if key in cache else product(m1, m2)
                if pr is None:
                    continue
                sign, m = pr
                c = c1 * c2
                if sign < 0:
                    c = -c
                prev = out.get(m)
                out[m] = c if prev is None else prev + c
        return RingElement(model, out)

    def __rmul__(self, other) -> "RingElement":
        # scalars are central
        return self.__mul__(other)

    def __pow__(self, n: int) -> "RingElement":
        if n < 0:
            return invert(self) ** (-n)
        out = self.model.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other) -> "RingElement":
        return self * invert(self._lift(other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            try:
                other = self._lift(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.model == other.model and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.model, tuple((m, hash(c)) for m, c in self.canonical_terms())))

    # -- printing -------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.canonical_terms():
            name = self.model.monomial_name(m)
            if name == "1":
                parts.append(f"({c})")
            elif c.is_one():
                parts.append(name)
            else:
                parts.append(f"({c})*{name}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"RingElement[g={self.model.genus}, d={self.model.factors}, {self.model.theory}]({self})"

    def to_json(self) -> dict:
        model = self.model
        out = {
            "genus": model.genus,
            "factors": model.factors,
            "theory": model.theory,
            "terms": [
                {"monomial": model.monomial_name(m), "coeff": str(c)}
                for m, c in self.canonical_terms()
            ],
        }
        if model.extra_vars:
            out["extra_vars"] = list(model.extra_vars)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "RingElement":
        from .expr import parse, evaluate

        model = make_model(data["genus"], data["factors"], data["theory"], data.get("extra_vars", ()))
        total = model.zero()
        for term in data["terms"]:
            coeff = evaluate(parse(term["coeff"]), model)
            if not coeff.is_scalar():
                raise ValueError(f"coefficient {term['coeff']!r} is not a scalar")
            mono = evaluate(parse(term["monomial"]), model)
            total = total + coeff * mono
        return total


# -- diagonal ---------------------------------------------------------------


def _diagonal(model: RingModel, k: int, l: int, signs: tuple[int, int]) -> RingElement:
    """pt_k + pt_l + s_ab * sum a_i(k) b_i(l) + s_ba * sum b_i(k) a_i(l)."""
    s_ab, s_ba = signs
    total = model.point(k) + model.point(l)
    for i in range(1, model.genus + 1):
        total = total + s_ab * (model.curve_class("a", k, i) * model.curve_class("b", l, i))
        total = total + s_ba * (model.curve_class("b", k, i) * model.curve_class("a", l, i))
    return total


def diagonal_transfer_holds(model: RingModel, delta: RingElement, k: int = 1, l: int = 2) -> bool:
    """Check delta * p_k^* x == delta * p_l^* x for every curve basis class x."""
    g = model.genus
    classes = [("pt", 1)] + [(kind, i) for kind in ("a", "b") for i in range(1, g + 1)]
    for kind, i in classes:
        if delta * model.curve_class(kind, k, i) != delta * model.curve_class(kind, l, i):
            return False
    return True


_SIGNS: tuple[int, int] | None = None


def find_diagonal_signs() -> tuple[int, int]:
    """Fix the Kunneth signs of the diagonal by brute force at genus 1.

    Of the four sign choices on the odd cross terms, exactly one makes the
    diagonal absorb classes symmetrically (delta * x_1 = delta * x_2) and
    satisfy delta^2 = (2 - 2g) pt x pt.
    """
    global _SIGNS
    if _SIGNS is not None:
        return _SIGNS
    model = make_model(1, 2, "additive")
    good = []
    for signs in product((1, -1), repeat=2):
        delta = _diagonal(model, 1, 2, signs)
        square_ok = delta * delta == (2 - 2 * model.genus) * (model.point(1) * model.point(2))
        if square_ok and diagonal_transfer_holds(model, delta):
            good.append(signs)
    if len(good) != 1:
        raise RuntimeError(f"diagonal sign convention is not unique: {good}")
    _SIGNS = good[0]
    return _SIGNS


# -- line bundle monomials and Euler classes ----------------------------------


def _normalise(items: Iterable[tuple[object, int]]) -> tuple:
    acc: dict = {}
    for key, e in items:
        acc[key] = acc.get(key, 0) + e
    return tuple(sorted((k, e) for k, e in acc.items() if e))


@dataclass(frozen=True)
class LineBundleMonomial:
    """t^t_exp * prod t_k^e_k * prod X^e_X * prod O(Delta_kl)^e_kl, purely formal."""

    t_exp: int = 0
    slots: tuple[tuple[int, int], ...] = ()
    extras: tuple[tuple[str, int], ...] = ()
    diagonals: tuple[tuple[tuple[int, int], int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slots", _normalise(self.slots))
        object.__setattr__(self, "extras", _normalise(self.extras))
        diags = []
        for (k, l), e in self.diagonals:
            if k == l:
                raise ValueError("O(Delta_kk) is not a diagonal divisor")
            diags.append(((min(k, l), max(k, l)), e))
        object.__setattr__(self, "diagonals", _normalise(diags))

    @classmethod
    def make(cls, t: int = 0, slots: Mapping[int, int] | None = None, extras: Mapping[str, int] | None = None,
             diagonals: Mapping[tuple[int, int], int] | None = None) -> "LineBundleMonomial":
        return cls(t, tuple((slots or {}).items()), tuple((extras or {}).items()), tuple((diagonals or {}).items()))

    def __mul__(self, other: "LineBundleMonomial") -> "LineBundleMonomial":
        return LineBundleMonomial(
            self.t_exp + other.t_exp,
            self.slots + other.slots,
            self.extras + other.extras,
            self.diagonals + other.diagonals,
        )

    def __pow__(self, n: int) -> "LineBundleMonomial":
        return LineBundleMonomial(
            self.t_exp * n,
            tuple((k, e * n) for k, e in self.slots),
            tuple((k, e * n) for k, e in self.extras),
            tuple((k, e * n) for k, e in self.diagonals),
        )

    def inverse(self) -> "LineBundleMonomial":
        return self ** -1

    def __truediv__(self, other: "LineBundleMonomial") -> "LineBundleMonomial":
        return self * other.inverse()

    def is_trivial(self) -> bool:
        return not (self.t_exp or self.slots or self.extras or self.diagonals)

    def relabel(self, mapping: Mapping[int, int]) -> "LineBundleMonomial":
        """Move slot indices along ``mapping`` (1-based, missing keys fixed)."""
        return LineBundleMonomial(
            self.t_exp,
            tuple((mapping.get(k, k), e) for k, e in self.slots),
            self.extras,
            tuple(((mapping.get(k, k), mapping.get(l, l)), e) for (k, l), e in self.diagonals),
        )

    def __str__(self) -> str:
        parts = []

        def fmt(name: str, e: int) -> str:
            return name if e == 1 else f"{name}^{e}"

        if self.t_exp:
            parts.append(fmt("t", self.t_exp))
        parts += [fmt(f"t{k}", e) for k, e in self.slots]
        parts += [fmt(name, e) for name, e in self.extras]
        parts += [fmt(f"O(Delta({k},{l}))", e) for (k, l), e in self.diagonals]
        return "*".join(parts) if parts else "1"


def primary_classes(model: RingModel, m: LineBundleMonomial) -> list[tuple[RingElement, int]]:
    """First Chern classes of the generating line bundles with their exponents."""
    out: list[tuple[RingElement, int]] = []
    if m.t_exp:
        out.append((model.tau, m.t_exp))
    for k, e in m.slots:
        out.append((model.u(k), e))
    for name, e in m.extras:
        out.append((model.var(name), e))
    for (k, l), e in m.diagonals:
        # c_1(O(Delta_kl)) is the diagonal class itself in the cohomology model
        out.append((model.diagonal_class(k, l), e))
    return out


def fgl_apply(model: RingModel, x: RingElement, y: RingElement) -> RingElement:
    fgl = model.fgl
    if fgl.preset == "additive":
        return x + y
    if fgl.preset == "multiplicative":
        return x + y - x * y
    out = x + y
    xp, yp = [model.one()], [model.one()]
    for (i, j), coeff in fgl.coefficients.items():
        while len(xp) <= i:
            xp.append(xp[-1] * x)
        while len(yp) <= j:
            yp.append(yp[-1] * y)
        out = out + (xp[i] * yp[j]) * _beta_coefficient(model, coeff)
    return out


def _beta_coefficient(model: RingModel, coeff) -> RationalFunction:
    field = model.field
    names = model.fgl.beta_names
    total = field.zero()
    for exp, c in coeff.to_dict().items():
        term = field.constant(_fraction(c))
        for name, e in zip(names, exp):
            if e:
                term = term * field.gen(name) ** e
        total = total + term
    return total


def _fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def fgl_iota(model: RingModel, x: RingElement) -> RingElement:
    """Formal inverse of a Chern class inside the ring (closed form for exact laws)."""
    fgl = model.fgl
    if fgl.preset == "additive":
        return -x
    if fgl.preset == "multiplicative":
        # u + v - uv = 0  =>  v = u / (u - 1)
        return x * invert(x - 1)
    out = model.zero()
    power = model.one()
    for k in range(max(fgl.inverse_coefficients) + 1):
        if k in fgl.inverse_coefficients:
            out = out + power * _beta_coefficient(model, fgl.inverse_coefficients[k])
        power = power * x
    return out


def euler(model: RingModel, m: LineBundleMonomial) -> RingElement:
    """Euler class (= c_1) of a line-bundle monomial by chaining the group law."""
    chain: list[RingElement] = []
    for cls, e in primary_classes(model, m):
        base = cls if e > 0 else fgl_iota(model, cls)
        chain.extend([base] * abs(e))
    if not chain:
        return model.zero()
    return reduce(lambda x, y: fgl_apply(model, x, y), chain)


# -- inversion, permutation, substitution ----------------------------------


def invert(x: RingElement) -> RingElement:
    """Exact inverse: invert the scalar part, then a finite geometric series."""
    s = x.scalar_part()
    if not s:
        raise NonInvertibleError(f"element with zero scalar part is not invertible: {x}")
    s_inv = s.inverse()
    n = x.nilpotent_part() * s_inv
    out = x.model.one()
    power = x.model.one()
    while True:
        power = power * (-n)
        if power.is_zero():
            break
        out = out + power
    return out * s_inv


def _perm_images(model: RingModel, sigma: Sequence[int]) -> dict[str, str]:
    return {_slot_var(i + 1): _slot_var(sigma[i] + 1) for i in range(model.factors)}


def check_permutation(sigma: Sequence[int], d: int) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(d)):
        raise ValueError(f"{sigma} is not a permutation of 0..{d - 1}")
    return sigma


def relocate(model: RingModel, mono: Monomial, slots: Sequence[int], factors: int) -> tuple[int, Monomial]:
    """Move factor i of ``mono`` to position ``slots[i]`` among ``factors`` factors.

    Returns ``(sign, monomial)``; the sign is the Koszul sign of reordering
    the odd generators.
    """
    key = (mono, tuple(slots), factors)
    cache = model._relocate_cache
    if key in cache:
        return cache[key]
    new = [0] * factors
    for i, gen in enumerate(mono):
        new[slots[i]] = gen
    odd = [i for i, gen in enumerate(mono) if model.generator_degree(gen) % 2]
    sign = 1
    for a in range(len(odd)):
        for b in range(a + 1, len(odd)):
            if slots[odd[a]] > slots[odd[b]]:
                sign = -sign
    cache[key] = (sign, tuple(new))
    return cache[key]


def permute(sigma: Sequence[int], x: RingElement) -> RingElement:
    """Act by ``sigma`` (0-based images: factor i moves to factor sigma[i]).

    The u-variables are relabelled the same way and odd classes pick up the
    Koszul sign of the reordering.
    """
    model = x.model
    sigma = check_permutation(sigma, model.factors)
    if sigma == tuple(range(model.factors)):
        return x
    images = _perm_images(model, sigma)
    field = model.field
    out = {}
    for mono, c in x.terms.items():
        sign, new = relocate(model, mono, sigma, model.factors)
        coeff = c if c.is_constant() else c.map_into(field, images)
        out[new] = -coeff if sign < 0 else coeff
    return RingElement(model, out)


def symmetrize(x: RingElement) -> RingElement:
    model = x.model
    total = model.zero()
    for sigma in permutations(range(model.factors)):
        total = total + permute(sigma, x)
    return total


def is_symmetric(x: RingElement) -> bool:
    """Invariance under the adjacent transpositions, which generate S_d."""
    d = x.model.factors
    for i in range(d - 1):
        sigma = list(range(d))
        sigma[i], sigma[i + 1] = sigma[i + 1], sigma[i]
        if permute(sigma, x) != x:
            return False
    return True


def embed(x: RingElement, target: RingModel, slots: Sequence[int]) -> RingElement:
    """Place factor i of ``x`` into factor ``slots[i]`` (0-based) of ``target``."""
    source = x.model
    if (source.genus, source.fgl) != (target.genus, target.fgl):
        raise ValueError("embedding needs matching genus and theory")
    slots = tuple(slots)
    if len(slots) != source.factors or len(set(slots)) != len(slots):
        raise ValueError(f"bad slot assignment {slots}")
    images = {_slot_var(i + 1): _slot_var(s + 1) for i, s in enumerate(slots)}
    field = target.field
    out = {}
    for mono, c in x.terms.items():
        sign, new = relocate(source, mono, slots, target.factors)
        coeff = c.map_into(field, images)
        out[new] = -coeff if sign < 0 else coeff
    return RingElement(target, out)


def substitute(x: RingElement, var: str, value: RingElement) -> RingElement:
    """Substitute ``value`` for the coefficient variable ``var``.

    ``value = r + n`` with scalar ``r`` and nilpotent ``n``; every coefficient
    f becomes the finite Taylor sum f(r) + f'(r) n + f''(r) n^2 / 2 + ...
    """
    model = x.model
    if value.model != model:
        raise ValueError("substituted value lives in a different model")
    if var not in model.field.index:
        raise KeyError(f"unknown variable {var!r}")
    r = value.scalar_part()
    n = value.nilpotent_part()
    n_powers = [model.one()]
    if n:
        while True:
            nxt = n_powers[-1] * n
            if nxt.is_zero():
                break
            n_powers.append(nxt)
    total = model.zero()
    for mono, c in x.terms.items():
        basis = RingElement(model, {mono: model.field.one()})
        if not c.depends_on(var):
            total = total + basis * c
            continue
        expanded = model.zero()
        deriv = c
        for k, npow in enumerate(n_powers):
            if k:
                deriv = deriv.derivative(var)
                if not deriv:
                    break
            at_r = deriv.substitute(var, r)
            expanded = expanded + npow * (at_r * _inv_factorial(model, k))
        total = total + expanded * basis
    return total


def _inv_factorial(model: RingModel, k: int) -> RationalFunction:
    return model.field.constant(Fraction(1, math.factorial(k)))


def specialize(x: RingElement, values: Mapping[str, object]) -> RingElement:
    """Evaluate every coefficient at a rational point; the curve classes stay symbolic.

    ``values`` must assign every variable of the coefficient field.  This is a
    ring homomorphism, so identities survive it exactly; a denominator that
    vanishes at the point raises :class:`NonInvertibleError`.
    """
    model = x.model
    field = model.field
    missing = [name for name in field.names if name not in values]
    if missing:
        raise KeyError(f"no value for {missing}")
    point = [_as_fmpq(values[name]) for name in field.names] or [_as_fmpq(0)]
    out = {}
    for mono, c in x.terms.items():
        den = c.den(*point)
        if den == 0:
            raise NonInvertibleError(f"denominator {c.den} vanishes at the chosen point")
        out[mono] = field.constant(_fraction(c.num(*point) / den))
    return RingElement(model, out)
