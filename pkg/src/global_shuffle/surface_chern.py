"""Intersection arithmetic on the ruled surface S = P(T*C + O) over a genus-g curve.

Even cohomology classes of S are triples ``(r, b_D D + b_f f, c)`` with the
products ``f^2 = 0``, ``D f = 1``, ``D^2 = 2 - 2g``; classes on C are pairs
``(r, deg)``.  Entries are kept as :class:`fractions.Fraction` so Todd
arithmetic stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class SurfaceClass:
    r: Fraction
    b_D: Fraction
    b_f: Fraction
    c: Fraction
    genus: int

    def __post_init__(self):
        for name in ("r", "b_D", "b_f", "c"):
            object.__setattr__(self, name, _q(getattr(self, name)))

    @classmethod
    def unit(cls, genus: int) -> "SurfaceClass":
        return cls(1, 0, 0, 0, genus)

    @classmethod
    def D(cls, genus: int) -> "SurfaceClass":
        return cls(0, 1, 0, 0, genus)

    @classmethod
    def f(cls, genus: int) -> "SurfaceClass":
        return cls(0, 0, 1, 0, genus)

    @classmethod
    def point(cls, genus: int) -> "SurfaceClass":
        return cls(0, 0, 0, 1, genus)

    def _check(self, other: "SurfaceClass") -> None:
        if not isinstance(other, SurfaceClass):
            raise TypeError(f"expected a SurfaceClass, got {type(other).__name__}")
        if other.genus != self.genus:
            raise ValueError(f"genus mismatch: {self.genus} vs {other.genus}")

    def __add__(self, other: "SurfaceClass") -> "SurfaceClass":
        self._check(other)
        return SurfaceClass(self.r + other.r, self.b_D + other.b_D, self.b_f + other.b_f, self.c + other.c, self.genus)

    def __neg__(self) -> "SurfaceClass":
        return SurfaceClass(-self.r, -self.b_D, -self.b_f, -self.c, self.genus)

    def __sub__(self, other: "SurfaceClass") -> "SurfaceClass":
        return self + (-other)

    def __mul__(self, other) -> "SurfaceClass":
        if isinstance(other, (int, Fraction)):
            return SurfaceClass(self.r * other, self.b_D * other, self.b_f * other, self.c * other, self.genus)
        return surf_mul(self, other)

    __rmul__ = __mul__

    def intersect(self, other: "SurfaceClass") -> Fraction:
        """The degree of the product of the H^2 parts."""
        self._check(other)
        return (
            self.b_D * other.b_D * (2 - 2 * self.genus)
            + self.b_D * other.b_f
            + self.b_f * other.b_D
        )

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.r, self.b_D, self.b_f, self.c)

    def __str__(self) -> str:
        return f"({_fmt(self.r)}, {_fmt(self.b_D)}*D + {_fmt(self.b_f)}*f, {_fmt(self.c)})"

    def to_json(self) -> dict:
        return {"r": _fmt(self.r), "D": _fmt(self.b_D), "f": _fmt(self.b_f), "c": _fmt(self.c), "genus": self.genus}


@dataclass(frozen=True)
class CurveEvenClass:
    r: Fraction
    deg: Fraction
    genus: int

    def __post_init__(self):
        object.__setattr__(self, "r", _q(self.r))
        object.__setattr__(self, "deg", _q(self.deg))

    def _check(self, other: "CurveEvenClass") -> None:
        if other.genus != self.genus:
            raise ValueError(f"genus mismatch: {self.genus} vs {other.genus}")

    def __add__(self, other: "CurveEvenClass") -> "CurveEvenClass":
        self._check(other)
        return CurveEvenClass(self.r + other.r, self.deg + other.deg, self.genus)

    def __mul__(self, other: "CurveEvenClass") -> "CurveEvenClass":
        self._check(other)
        return CurveEvenClass(self.r * other.r, self.r * other.deg + self.deg * other.r, self.genus)

    def __truediv__(self, other: "CurveEvenClass") -> "CurveEvenClass":
        self._check(other)
        if other.r == 0:
            raise ZeroDivisionError("dividing by a class with zero rank part")
        r = self.r / other.r
        return CurveEvenClass(r, (self.deg - r * other.deg) / other.r, self.genus)

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return (self.r, self.deg)

    def __str__(self) -> str:
        return f"({_fmt(self.r)}, {_fmt(self.deg)})"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def surf_mul(x: SurfaceClass, y: SurfaceClass) -> SurfaceClass:
    """Product in H^even(S), truncated above H^4."""
    x._check(y)
    return SurfaceClass(
        x.r * y.r,
        x.r * y.b_D + y.r * x.b_D,
        x.r * y.b_f + y.r * x.b_f,
        x.r * y.c + y.r * x.c + x.intersect(y),
        x.genus,
    )


def todd_surface(g: int) -> SurfaceClass:
    return SurfaceClass(1, 1, 0, 1 - g, g)


def todd_curve(g: int) -> CurveEvenClass:
    return CurveEvenClass(1, 1 - g, g)


def grr_pushforward(x: SurfaceClass) -> CurveEvenClass:
    """pi_*(a, b_D D + b_f f, c) = (b_D, c)."""
    return CurveEvenClass(x.b_D, x.c, x.genus)


def ch_from_invariants(r, a, b, c2, g: int) -> SurfaceClass:
    """ch(E) = (r, aD + bf, a^2(1-g) + ab - c_2) from rank, c_1 = aD + bf and c_2."""
    a, b = _q(a), _q(b)
    return SurfaceClass(r, a, b, a * a * (1 - g) + a * b - _q(c2), g)


def c2_from_ch(ch: SurfaceClass) -> Fraction:
    """c_2 = c_1^2 / 2 - ch_2."""
    return ch.intersect(ch) / 2 - ch.c


def grr_chain(r, a, b, c2, g: int) -> CurveEvenClass:
    """ch(R pi_* E) td(C) = pi_*(ch(E) td(S))."""
    return grr_pushforward(surf_mul(ch_from_invariants(r, a, b, c2, g), todd_surface(g)))


def pushforward_chern(r, a, b, c2, g: int) -> tuple[Fraction, Fraction]:
    """(rk, c_1) of R pi_* E, dividing the GRR side by td(C)."""
    ch = grr_chain(r, a, b, c2, g) / todd_curve(g)
    return ch.r, ch.deg


@dataclass(frozen=True)
class TorsionSolution:
    a: Fraction
    c2: Fraction


def solve_torsion_pushforward(r, b, d, g: int) -> TorsionSolution:
    """Impose rk R pi_* E = 0 and c_1(R pi_* E) = -d on the GRR chain.

    The rank is a + r, which fixes a; c_1 is affine in c_2 with slope -1.
    """
    a = -_q(r)
    rank, c1_at_zero = pushforward_chern(r, a, b, 0, g)
    assert rank == 0
    _, c1_at_one = pushforward_chern(r, a, b, 1, g)
    slope = c1_at_one - c1_at_zero
    c2 = (-_q(d) - c1_at_zero) / slope
    return TorsionSolution(a, c2)


@dataclass(frozen=True)
class FramedInvariants:
    rank: int
    c1_D: Fraction
    c1_f: Fraction
    c2: Fraction
    ch: SurfaceClass

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "c1_D": _fmt(self.c1_D),
            "c1_f": _fmt(self.c1_f),
            "c2": _fmt(self.c2),
            "ch": self.ch.to_json(),
        }


def framed_invariants(n: int, d: int, g: int) -> FramedInvariants:
    """Numerical invariants of the framed torsion-free sheaf attached to degree d, rank n."""
    if n < 1 or d < 0 or g < 0:
        raise ValueError("need n >= 1, d >= 0, g >= 0")
    b = Fraction(n * (2 - 2 * g))
    sol = solve_torsion_pushforward(n, b, d, g)
    return FramedInvariants(n, sol.a, b, sol.c2, ch_from_invariants(n, sol.a, b, sol.c2, g))


def framed_ch_by_construction(n: int, d: int, g: int) -> SurfaceClass:
    """ch(pi^* omega^-1 (-2D)[1]) * (ch(pi^* E_tilde omega^-1) - ch(pi^* alpha (D)[1]))."""
    twist = SurfaceClass(1, -2, 2 - 2 * g, 0, g)
    torsion = SurfaceClass(0, 0, d, 0, g)
    framing = surf_mul(SurfaceClass(-n, 0, d, 0, g), todd_surface(g))
    return surf_mul(twist, torsion - framing)
