"""Exact multivariate rational functions over Q.

A :class:`RationalFunction` is a reduced fraction ``num/den`` of sparse
polynomials (``flint.fmpq_mpoly``) whose denominator is monic with respect
to the lex order of its :class:`FunctionField`.  With that normalisation two
rational functions are equal iff their numerators and denominators coincide,
so equality never needs a tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import flint


class NonInvertibleError(ZeroDivisionError):
    """Raised when inverting zero or when a substitution kills a denominator."""


def _as_fmpq(value) -> flint.fmpq:
    if isinstance(value, flint.fmpq):
        return value
    if isinstance(value, Fraction):
        return flint.fmpq(value.numerator, value.denominator)
    if isinstance(value, int):
        return flint.fmpq(value)
    raise TypeError(f"cannot use {type(value).__name__} as a rational constant")


class FunctionField:
    """The field Q(x_1, ..., x_n) for a fixed ordered tuple of names."""

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        # flint rejects zero-variable contexts; a dummy generator keeps Q itself usable.
        self._ctx_names = self.names or ("_",)
        self.ctx = flint.fmpq_mpoly_ctx.get(self._ctx_names, "lex")
        self.index = {name: i for i, name in enumerate(self.names)}
        self._one = self.ctx.constant(1)

    def __repr__(self) -> str:
        return f"FunctionField({', '.join(self.names)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FunctionField) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def gen(self, name: str) -> "RationalFunction":
        if name not in self.index:
            raise KeyError(f"unknown variable {name!r} in {self!r}")
        return RationalFunction._raw(self, self.ctx.gens()[self.index[name]], self._one)

    def gens(self) -> dict[str, "RationalFunction"]:
        return {name: self.gen(name) for name in self.names}

    def constant(self, value) -> "RationalFunction":
        return RationalFunction._raw(self, self.ctx.constant(_as_fmpq(value)), self._one)

    def zero(self) -> "RationalFunction":
        return self.constant(0)

    def one(self) -> "RationalFunction":
        return self.constant(1)

    def poly(self, terms: Mapping[tuple[int, ...], object]) -> "RationalFunction":
        """Build a polynomial from ``{exponent vector: coefficient}``."""
        data = {exp: _as_fmpq(c) for exp, c in terms.items()}
        return RationalFunction._raw(self, self.ctx.from_dict(data), self._one)


@lru_cache(maxsize=None)
def function_field(names: tuple[str, ...]) -> FunctionField:
    return FunctionField(names)


class RationalFunction:
    """Reduced fraction of two polynomials with a monic denominator."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: FunctionField, num, den=None):
        self.field = field
        num = self._coerce_poly(num)
        den = field._one if den is None else self._coerce_poly(den)
        if den.is_zero():
            raise NonInvertibleError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, field._one
            return
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num, den = num / g, den / g
            lc = den.leading_coefficient()
            if lc != 1:
                num, den = num / lc, den / lc
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, field: FunctionField, num, den) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.field, obj.num, obj.den = field, num, den
        return obj

    def _coerce_poly(self, value):
        if isinstance(value, flint.fmpq_mpoly):
            return value
        return self.field.ctx.constant(_as_fmpq(value))

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.field is not self.field and other.field != self.field:
                raise ValueError(f"field mismatch: {self.field!r} vs {other.field!r}")
            return other
        return self.field.constant(other)

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        q = self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0)
        return Fraction(int(q.p), int(q.q))

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = self.field.constant(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.field.names, str(self.num), str(self.den)))

    # -- arithmetic -----------------------------------------------------

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(self.field, -self.num, self.den)

    def __add__(self, other) -> "RationalFunction":
        if other.__class__ is RationalFunction and self.field is other.field and self.den.is_one() and other.den.is_one():
            return RationalFunction._raw(self.field, self.num + other.num, self.den)
        other = self._coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            if self.den.is_one():
                return RationalFunction._raw(self.field, self.num + other.num, self.den)
            return RationalFunction(self.field, self.num + other.num, self.den)
        g = self.den.gcd(other.den)
        a, b = self.den / g, other.den / g
        return RationalFunction(self.field, self.num * b + other.num * a, a * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        if other.__class__ is RationalFunction and self.field is other.field and self.den.is_one() and other.den.is_one():
            return RationalFunction._raw(self.field, self.num * other.num, self.den)
        if not isinstance(other, RationalFunction):
            q = _as_fmpq(other)
            if q == 0:
                return self.field.zero()
            return RationalFunction._raw(self.field, self.num * q, self.den)
        other = self._coerce(other)
        if self.den.is_one() and other.den.is_one():
            return RationalFunction._raw(self.field, self.num * other.num, self.den)
        if self.num.is_zero() or other.num.is_zero():
            return self.field.zero()
        # cross-cancel first: keeps intermediate polynomials small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = (self.num / g1) * (other.num / g2)
        den = (self.den / g2) * (other.den / g1)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFunction._raw(self.field, num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise NonInvertibleError("inverse of zero rational function")
        return RationalFunction(self.field, self.den, self.num)

    def __truediv__(self, other) -> "RationalFunction":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "RationalFunction":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction._raw(self.field, self.num ** n, self.den ** n)

    # -- calculus and substitution ---------------------------------------

    def derivative(self, name: str) -> "RationalFunction":
        i = self.field.index[name]
        dn = self.num.derivative(i)
        dd = self.den.derivative(i)
        if dd.is_zero():
            return RationalFunction(self.field, dn, self.den)
        return RationalFunction(self.field, dn * self.den - self.num * dd, self.den * self.den)

    def depends_on(self, name: str) -> bool:
        i = self.field.index.get(name)
        if i is None:
            return False
        return self.num.degrees()[i] > 0 or self.den.degrees()[i] > 0

    def variables(self) -> set[str]:
        used = set()
        for poly in (self.num, self.den):
            for name, deg in zip(self.field.names, poly.degrees()):
                if deg > 0:
                    used.add(name)
        return used

    def substitute(self, name: str, value: "RationalFunction") -> "RationalFunction":
        """Replace the variable ``name`` by ``value`` (a function in the same field)."""
        value = self._coerce(value)
        i = self.field.index[name]
        if not self.depends_on(name):
            return self
        n_num, n_deg = _homogenised(self.num, i, value.num, value.den)
        d_num, d_deg = _homogenised(self.den, i, value.num, value.den)
        if d_num.is_zero():
            raise NonInvertibleError(f"denominator {self.den} vanishes at {name} = {value}")
        # num/den = (n_num / q^n_deg) / (d_num / q^d_deg)
        q = value.den
        if n_deg >= d_deg:
            return RationalFunction(self.field, n_num, d_num * q ** (n_deg - d_deg))
        return RationalFunction(self.field, n_num * q ** (d_deg - n_deg), d_num)

    def evaluate(self, values: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        out = self
        for name, value in values.items():
            out = out.substitute(name, value)
        return out

    def map_into(self, field: FunctionField, images: Mapping[str, str]) -> "RationalFunction":
        """Rename variables into ``field``; ``images`` maps source names to target names.

        Source variables missing from ``images`` must have the same name in the target.
        """
        gens = field.ctx.gens()
        target = []
        for name in self.field._ctx_names:
            tname = images.get(name, name)
            if tname in field.index:
                target.append(gens[field.index[tname]])
            elif self.field.names and self.depends_on(name):
                raise KeyError(f"variable {name!r} has no image in {field!r}")
            else:
                target.append(field.ctx.constant(0))
        num = self.num.compose(*target, ctx=field.ctx)
        den = self.den.compose(*target, ctx=field.ctx)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFunction._raw(field, num, den)

    # -- printing -------------------------------------------------------

    def __str__(self) -> str:
        num = str(self.num)
        if self.den.is_one():
            return num
        return f"({num})/({self.den})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def _homogenised(poly, i: int, p, q):
    """Return ``(P, n)`` with ``poly(x_i = p/q) == P / q**n``."""
    by_power: dict[int, dict] = {}
    for exp, coeff in poly.to_dict().items():
        k = exp[i]
        rest = exp[:i] + (0,) + exp[i + 1:]
        by_power.setdefault(k, {})[rest] = coeff
    n = max(by_power)
    ctx = poly.context()
    total = ctx.constant(0)
    p_pows = [ctx.constant(1)]
    q_pows = [ctx.constant(1)]
    for _ in range(n):
        p_pows.append(p_pows[-1] * p)
        q_pows.append(q_pows[-1] * q)
    for k, terms in by_power.items():
        total += ctx.from_dict(terms) * p_pows[k] * q_pows[n - k]
    return total, n


def field_sum(items: Iterable[RationalFunction], field: FunctionField) -> RationalFunction:
    total = field.zero()
    for item in items:
        total = total + item
    return total
