"""Formal group laws and truncated power series.

Three laws are supported:

``additive``
    F(u, v) = u + v  (ordinary cohomology / Chow groups)
``multiplicative``
    F(u, v) = u + v - uv  (K-theory with e(L) = 1 - L^{-1})
``universal``
    the rational universal law, truncated in total degree.

The universal law is built from a generic logarithm whose derivative is
``1 / (1 + sum_i beta_i_1 u^i)``.  The symbols ``beta_i_1`` are then exactly
the coefficients of ``u^i v`` in F and freely generate the (rationalised)
Lazard ring, so the truncated law is commutative and associative on the nose
modulo the truncation degree.  All other coefficients are polynomials in them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import flint

PRESETS = ("additive", "multiplicative", "universal")
DEFAULT_TRUNCATION = 8


class SeriesRing:
    """Q[coefficient symbols][[series variables]] modulo total degree ``order``."""

    def __init__(self, series_vars: Sequence[str], coeff_vars: Sequence[str] = (), order: int = DEFAULT_TRUNCATION):
        if order < 1:
            raise ValueError("truncation order must be positive")
        self.series_vars = tuple(series_vars)
        self.coeff_vars = tuple(coeff_vars)
        self.order = order
        self.ctx = flint.fmpq_mpoly_ctx.get(self.series_vars + self.coeff_vars, "lex")
        self._nser = len(self.series_vars)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SeriesRing)
            and self.series_vars == other.series_vars
            and self.coeff_vars == other.coeff_vars
            and self.order == other.order
        )

    def __hash__(self) -> int:
        return hash((self.series_vars, self.coeff_vars, self.order))

    def __repr__(self) -> str:
        coeffs = f"[{', '.join(self.coeff_vars)}]" if self.coeff_vars else ""
        return f"Q{coeffs}[[{', '.join(self.series_vars)}]]/deg>={self.order}"

    def gen(self, name: str) -> "TruncatedSeries":
        idx = (self.series_vars + self.coeff_vars).index(name)
        return self.wrap(self.ctx.gens()[idx])

    def constant(self, value) -> "TruncatedSeries":
        return self.wrap(self.ctx.constant(value))

    def zero(self) -> "TruncatedSeries":
        return self.constant(0)

    def wrap(self, poly) -> "TruncatedSeries":
        return TruncatedSeries(self, self._truncate(poly))

    def _truncate(self, poly):
        n = self._nser
        if poly.is_zero() or poly.total_degree() < self.order:
            # total_degree over-counts coefficient symbols, so this is only a fast path
            return poly
        kept = {exp: c for exp, c in poly.to_dict().items() if sum(exp[:n]) < self.order}
        return self.ctx.from_dict(kept)

    def series_degree(self, exp: tuple[int, ...]) -> int:
        return sum(exp[: self._nser])


@dataclass(frozen=True)
class TruncatedSeries:
    ring: SeriesRing
    poly: object

    def _check(self, other: "TruncatedSeries") -> None:
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected a truncated series, got {type(other).__name__}")
        if other.ring != self.ring:
            raise ValueError(f"mismatched coefficient rings: {self.ring!r} vs {other.ring!r}")

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return self.ring.constant(other)

    def __add__(self, other) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, self.poly + self._lift(other).poly)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, -self.poly)

    def __sub__(self, other) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, self.poly - self._lift(other).poly)

    def __rsub__(self, other) -> "TruncatedSeries":
        return TruncatedSeries(self.ring, self._lift(other).poly - self.poly)

    def __mul__(self, other) -> "TruncatedSeries":
        return self.ring.wrap(self.poly * self._lift(other).poly)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncatedSeries":
        out = self.ring.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.ring == other.ring and self.poly == other.poly
        if isinstance(other, int):
            return self.poly == self.ring.ctx.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, str(self.poly)))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def has_constant_term(self) -> bool:
        n = len(self.ring.series_vars)
        return any(sum(exp[:n]) == 0 for exp in self.poly.to_dict())

    def substitute(self, values: Mapping[str, "TruncatedSeries"]) -> "TruncatedSeries":
        """Substitute series for series variables; all values share one ring."""
        rings = {v.ring for v in values.values()}
        if len(rings) != 1:
            raise ValueError("substituted values must share a ring")
        target = rings.pop()
        names = self.ring.series_vars
        powers: dict[str, list[TruncatedSeries]] = {}
        out = target.zero()
        for exp, coeff in self.poly.to_dict().items():
            term = target.constant(1)
            coeff_part = {}
            for k, e in enumerate(exp):
                if e == 0:
                    continue
                if k < len(names):
                    name = names[k]
                    pw = powers.setdefault(name, [target.constant(1)])
                    while len(pw) <= e:
                        pw.append(pw[-1] * values[name])
                    term = term * pw[e]
                else:
                    coeff_part[self.ring.coeff_vars[k - len(names)]] = e
            c = target.constant(coeff)
            for cname, e in coeff_part.items():
                c = c * target.gen(cname) ** e
            out = out + term * c
        return out

    def __str__(self) -> str:
        return str(self.poly)


@dataclass(frozen=True)
class FormalGroupLaw:
    preset: str
    truncation_degree: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown formal group law preset {self.preset!r}; expected one of {PRESETS}")
        if self.truncation_degree < 2:
            raise ValueError("truncation_degree must be at least 2")

    @property
    def name(self) -> str:
        if self.preset == "universal":
            return f"universal:{self.truncation_degree}"
        return self.preset

    @property
    def is_exact(self) -> bool:
        return self.preset != "universal"

    @cached_property
    def beta_names(self) -> tuple[str, ...]:
        if self.preset != "universal":
            return ()
        return tuple(f"beta_{i}_1" for i in range(1, self.truncation_degree - 1))

    def series_ring(self, series_vars: Sequence[str]) -> SeriesRing:
        return SeriesRing(series_vars, self.beta_names, self.truncation_degree)

    @cached_property
    def _bivariate(self) -> TruncatedSeries:
        ring = self.series_ring(("u", "v"))
        u, v = ring.gen("u"), ring.gen("v")
        if self.preset == "additive":
            return u + v
        if self.preset == "multiplicative":
            return u + v - u * v
        log, exp = self._log_exp()
        lu = log.substitute({"x": u})
        lv = log.substitute({"x": v})
        return exp.substitute({"x": lu + lv})

    def _log_exp(self) -> tuple[TruncatedSeries, TruncatedSeries]:
        ring = self.series_ring(("x",))
        x = ring.gen("x")
        # 1 / (1 + s) with s = sum beta_i_1 x^i, by the (finite) geometric series
        s = ring.zero()
        for i, name in enumerate(self.beta_names, start=1):
            s = s + ring.gen(name) * x ** i
        dlog = ring.zero()
        power = ring.constant(1)
        for k in range(self.truncation_degree):
            dlog = dlog + power * (-1) ** k
            power = power * s
        log = ring.wrap(ring.ctx.from_dict(
            {(k + 1, *rest): c / (k + 1) for (k, *rest), c in _items(dlog.poly)}
        ))
        # compositional inverse by fixed point: exp = x - (log(exp) - exp)
        exp_series = x
        for _ in range(self.truncation_degree):
            exp_series = x - (log.substitute({"x": exp_series}) - exp_series)
        return log, exp_series

    @cached_property
    def coefficients(self) -> dict[tuple[int, int], object]:
        """Coefficients of u^i v^j (i, j >= 1) as polynomials in the beta symbols."""
        out = {}
        beta_ctx = flint.fmpq_mpoly_ctx.get(self.beta_names or ("_",), "lex")
        for exp, coeff in self._bivariate.poly.to_dict().items():
            i, j = exp[0], exp[1]
            if i >= 1 and j >= 1:
                rest = exp[2:] if self.beta_names else (0,)
                term = beta_ctx.from_dict({rest: coeff})
                out[(i, j)] = out.get((i, j), beta_ctx.constant(0)) + term
        return {k: v for k, v in out.items() if not v.is_zero()}

    @cached_property
    def inverse_coefficients(self) -> dict[int, object]:
        """Coefficients c_k of the formal inverse iota(x) = sum c_k x^k."""
        ring = self.series_ring(("x",))
        inv = fgl_inverse(self, ring.gen("x"))
        beta_ctx = flint.fmpq_mpoly_ctx.get(self.beta_names or ("_",), "lex")
        out: dict[int, object] = {}
        for exp, coeff in inv.poly.to_dict().items():
            rest = exp[1:] if self.beta_names else (0,)
            out[exp[0]] = out.get(exp[0], beta_ctx.constant(0)) + beta_ctx.from_dict({rest: coeff})
        return out

    def __call__(self, x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
        return fgl_sum(self, x, y)

    def __str__(self) -> str:
        return str(self._bivariate)


def make_fgl(preset: str, truncation_degree: int = DEFAULT_TRUNCATION) -> FormalGroupLaw:
    return FormalGroupLaw(preset, truncation_degree)


def parse_theory(text: str) -> FormalGroupLaw:
    """Parse ``additive``, ``multiplicative`` or ``universal[:N]``."""
    name, _, depth = text.partition(":")
    if name not in PRESETS:
        raise ValueError(f"unknown theory {text!r}")
    if depth:
        if name != "universal":
            raise ValueError(f"theory {name!r} takes no truncation degree")
        return FormalGroupLaw(name, int(depth))
    return FormalGroupLaw(name)


def _items(poly):
    return [((exp[0], *exp[1:]), c) for exp, c in poly.to_dict().items()]


def fgl_sum(F: FormalGroupLaw, x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    """F(x, y), truncated in the ring of ``x``."""
    x._check(y)
    if F.preset == "additive":
        return x + y
    if F.preset == "multiplicative":
        return x + y - x * y
    ring = x.ring
    missing = set(F.beta_names) - set(ring.coeff_vars)
    if missing:
        raise ValueError(f"series ring {ring!r} lacks the law's symbols {sorted(missing)}")
    out = x + y
    xp, yp = [ring.constant(1)], [ring.constant(1)]
    for (i, j), coeff in F.coefficients.items():
        while len(xp) <= i:
            xp.append(xp[-1] * x)
        while len(yp) <= j:
            yp.append(yp[-1] * y)
        out = out + xp[i] * yp[j] * _beta_in(ring, F, coeff)
    return out


def _beta_in(ring: SeriesRing, F: FormalGroupLaw, coeff) -> TruncatedSeries:
    out = ring.zero()
    for exp, c in coeff.to_dict().items():
        term = ring.constant(c)
        for name, e in zip(F.beta_names, exp):
            if e:
                term = term * ring.gen(name) ** e
        out = out + term
    return out


def fgl_inverse(F: FormalGroupLaw, x: TruncatedSeries) -> TruncatedSeries:
    """The formal inverse iota(x) with F(x, iota(x)) = 0 modulo truncation.

    Solved order by order from the fixed point iota = -x - (F(x, iota) - x - iota),
    starting at -x; each pass fixes one more degree.
    """
    if x.has_constant_term():
        raise ValueError("formal inverse needs a series with zero constant term")
    iota = -x
    for _ in range(x.ring.order):
        nxt = -x - (fgl_sum(F, x, iota) - x - iota)
        if nxt == iota:
            break
        iota = nxt
    return iota
