"""Named invariant checks shared by ``selftest`` and the acceptance suite.

Every check is addressed by a plain-data :class:`Task` (a registered name
plus keyword arguments made of ints and strings), so task lists can be
shipped to worker processes and their results reassembled in a fixed order.
"""

from __future__ import annotations

import random
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import distributions, expr, fgl, quot_weights, surface_chern
from .curve_ring import (
    RingElement,
    diagonal_transfer_holds,
    invert,
    make_model,
    symmetrize,
)
from .shuffle import (
    ShuffleElement,
    ShuffleTree,
    evaluate_tree,
    evaluate_tree_at,
    kernel_by_name,
    kernel_gc,
    kernel_gc_norm,
    random_point,
    rn_inverse,
    rn_map,
    shuffle_product,
    verify_genus_relation,
)

THEORIES = ("additive", "multiplicative")
KERNELS = ("gc", "gcnorm")


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class Task:
    check: str
    kwargs: tuple[tuple[str, object], ...] = field(default=())

    @classmethod
    def of(cls, check: str, **kwargs) -> "Task":
        return cls(check, tuple(sorted(kwargs.items())))

    def run(self) -> CheckResult:
        fn = CHECKS[self.check]
        kwargs = dict(self.kwargs)
        name = f"{self.check}(" + ", ".join(f"{k}={v}" for k, v in self.kwargs) + ")"
        try:
            ok, detail = fn(**kwargs)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        return CheckResult(name, bool(ok), detail)


CHECKS: dict[str, Callable[..., tuple[bool, str]]] = {}


def check(fn):
    CHECKS[fn.__name__] = fn
    return fn


def _run_task(task: Task) -> CheckResult:
    return task.run()


def run_tasks(tasks: Sequence[Task], jobs: int = 1) -> list[CheckResult]:
    """Run tasks, in worker processes when ``jobs > 1``; results keep the task order."""
    tasks = list(tasks)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [t.run() for t in tasks]


def _seed_for(*parts) -> int:
    return zlib.crc32(repr(parts).encode())


# -- kernels ----------------------------------------------------------------------


@check
def kernel_closed_form(genus: int, factors: int = 3) -> tuple[bool, str]:
    """g_C^norm (additive) is 1 - Delta(t + Delta) / (z (z + t)) with z = u_j - u_i, per ordered pair."""
    model = make_model(genus, factors, "additive")
    tau = model.tau
    bad = []
    for i in range(1, factors + 1):
        for j in range(1, factors + 1):
            if i == j:
                continue
            z = model.u(j) - model.u(i)
            delta = model.diagonal_class(i, j)
            closed = model.one() - delta * (tau + delta) * invert(z * (z + tau))
            if kernel_gc_norm().pair(model, i, j) != closed:
                bad.append((i, j))
    return not bad, f"mismatched pairs {bad}" if bad else ""


# -- quadratic relations ---------------------------------------------------------


QUADRATIC_PROBES = ("t1^-1", "t2^-1", "t*t1^-1", "t*t2^-1")


@check
def quadratic_relation(genus: int, theory: str, kernel: str, l1: str, l2: str) -> tuple[bool, str]:
    res = distributions.verify_quadratic(
        expr.parse_line_bundle(l1), expr.parse_line_bundle(l2), kernel_by_name(kernel), genus, theory
    )
    return res.holds, "" if res.holds else f"residual {res.residual}"


# -- genus relation ----------------------------------------------------------------


@check
def genus_relation(genus: int, i: int, j: int) -> tuple[bool, str]:
    res = verify_genus_relation(i, j, make_model(genus, 2, "additive"))
    return res.holds, "" if res.holds else f"residual {res.residual}"


# -- localization ------------------------------------------------------------------


@check
def derived_kernel(genus: int, theory: str, parts: str, normalised: int = 0) -> tuple[bool, str]:
    c = quot_weights.Composition(tuple(int(p) for p in parts.split(",")))
    res = quot_weights.compare_kernel(c, make_model(genus, c.degree, theory), bool(normalised))
    return res.equal, "" if res.equal else f"derived {res.derived} vs kernel {res.closed_form}"


@check
def tangent_counts(parts: str) -> tuple[bool, str]:
    c = quot_weights.Composition(tuple(int(p) for p in parts.split(",")))
    full, filtered, nilp = quot_weights.tangent_weights(c)
    d = c.degree
    cross = sum(c.parts[a] * c.parts[b] for a in range(len(c.parts)) for b in range(a + 1, len(c.parts)))
    ok = len(full) == d * d - d and len(nilp) == cross and len(filtered) == len(full) - cross
    return ok, f"|full|={len(full)}, |filtered|={len(filtered)}, |nilp|={len(nilp)}"


# -- renormalisation ---------------------------------------------------------------


@check
def rn_intertwines(genus: int, theory: str, k1: int, k2: int) -> tuple[bool, str]:
    m1 = make_model(genus, 1, theory)
    f = ShuffleElement.make(m1.u(1) ** k1)
    h = ShuffleElement.make(m1.u(1) ** k2)
    lhs = rn_map(shuffle_product(f, h, kernel_gc_norm()))
    rhs = shuffle_product(rn_map(f), rn_map(h), kernel_gc())
    back = rn_inverse(lhs) == shuffle_product(f, h, kernel_gc_norm())
    return lhs == rhs and back, "" if lhs == rhs else "RN(Xi_norm) != Xi_C(RN, RN)"


# -- associativity -----------------------------------------------------------------


def curve_classes(genus: int, slot: int = 1) -> list[str]:
    out = ["1"]
    out += [f"a({slot},{i})" for i in range(1, genus + 1)]
    out += [f"b({slot},{i})" for i in range(1, genus + 1)]
    out.append(f"pt({slot})")
    return out


def _with_power(power: int, cls: str, slot: int = 1) -> str:
    if power == 0:
        return cls
    u = f"u{slot}" if power == 1 else f"u{slot}^{power}"
    return u if cls == "1" else f"{u}*{cls}"


def degree_one_monomial(power: int, cls: str) -> str:
    return _with_power(power, cls, 1)


def degree_two_monomial(genus: int, theory: str, p1: int, i1: int, p2: int, i2: int) -> str | None:
    """The symmetrisation of u_1^p1 c_i1(1) * u_2^p2 c_i2(2), printed; None if it vanishes.

    ``i1``, ``i2`` index :func:`curve_classes`.
    """
    model = make_model(genus, 2, theory)
    c1 = curve_classes(genus, 1)[i1]
    c2 = curve_classes(genus, 2)[i2]
    src = f"({_with_power(p1, c1, 1)})*({_with_power(p2, c2, 2)})"
    value = symmetrize(expr.evaluate(expr.parse(src), model))
    return None if value.is_zero() else str(value)


def _element(src: str, genus: int, theory: str, degree: int) -> ShuffleElement:
    model = make_model(genus, degree, theory)
    return ShuffleElement.make(expr.evaluate(expr.parse(src), model))


@check
def associativity(genus: int, theory: str, kernel: str, f: str, h: str, k: str, degrees: str,
                  method: str = "points", seed: int = 0, points: int = 2) -> tuple[bool, str]:
    """Xi(Xi(f, h), k) == Xi(f, Xi(h, k)).

    ``method="symbolic"`` compares canonical forms; ``"points"`` compares
    exact specialisations at seeded random rational points.
    """
    d1, d2, d3 = (int(x) for x in degrees.split(","))
    g = kernel_by_name(kernel)
    x, y, z = _element(f, genus, theory, d1), _element(h, genus, theory, d2), _element(k, genus, theory, d3)
    left = ShuffleTree(ShuffleTree(x, y, g), z, g)
    right = ShuffleTree(x, ShuffleTree(y, z, g), g)
    if method == "symbolic":
        ok = evaluate_tree(left) == evaluate_tree(right)
        return ok, "" if ok else "bracketings differ"
    rng = random.Random(_seed_for(seed, genus, theory, kernel, f, h, k))
    for _ in range(points):
        us, fixed = random_point(left.model, rng)
        if evaluate_tree_at(left, us, fixed) != evaluate_tree_at(right, us, fixed):
            return False, f"bracketings differ at u={us}, {fixed}"
    return True, ""


def associativity_probes(genus: int, theory: str, kernel: str, seed: int, per_pattern: int = 4,
                         exhaustive: bool = True) -> list[Task]:
    """Probe set for associativity at one (genus, theory, kernel).

    All triples of bare curve classes in degree 1 (exhaustive), plus for
    every degree pattern in {1,2}^3 ``per_pattern`` seeded random triples of
    monomial elements with u-powers in {-1, 0, 1, 2}.
    """
    classes = curve_classes(genus)
    tasks = []
    if exhaustive:
        for a, b, c in product(classes, repeat=3):
            tasks.append(Task.of("associativity", genus=genus, theory=theory, kernel=kernel,
                                 f=a, h=b, k=c, degrees="1,1,1", seed=seed))
    rng = random.Random(_seed_for(seed, genus, theory, kernel))
    powers = (-1, 0, 1, 2)
    for pattern in product((1, 2), repeat=3):
        for _ in range(per_pattern):
            srcs = []
            for d in pattern:
                if d == 1:
                    srcs.append(degree_one_monomial(rng.choice(powers), rng.choice(classes)))
                    continue
                while True:
                    n = len(classes)
                    mono = degree_two_monomial(genus, theory, rng.choice(powers), rng.randrange(n),
                                               rng.choice(powers), rng.randrange(n))
                    if mono is not None:
                        srcs.append(mono)
                        break
            tasks.append(Task.of("associativity", genus=genus, theory=theory, kernel=kernel,
                                 f=srcs[0], h=srcs[1], k=srcs[2], degrees=",".join(map(str, pattern)), seed=seed))
    return tasks


# -- ring model --------------------------------------------------------------------


@check
def ring_model(genus: int, factors: int) -> tuple[bool, str]:
    """Graded commutativity, associativity, Delta^2 and the diagonal transfer identity.

    Commutativity and associativity run over all pairs and triples of basis
    monomials; associativity uses the full table of structure constants so
    that every triple is compared with vectorised lookups.
    """
    model = make_model(genus, factors, "additive")
    basis = model.basis
    deg = model.monomial_degree
    n = len(basis)
    index = {m: i for i, m in enumerate(basis)}
    # row/column n is the zero product; sign 0 marks it
    target = np.full((n + 1, n + 1), n, dtype=np.int64)
    sign = np.zeros((n + 1, n + 1), dtype=np.int8)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            pr = model.monomial_product(x, y)
            if pr is not None:
                target[i, j], sign[i, j] = index[pr[1]], pr[0]
    parity = np.array([deg(m) % 2 for m in basis], dtype=np.int8)
    koszul = np.where(np.outer(parity, parity) == 1, -1, 1).astype(np.int8)
    if not (np.array_equal(target[:n, :n], target[:n, :n].T)
            and np.array_equal(sign[:n, :n], koszul * sign[:n, :n].T)):
        return False, "graded commutativity fails"

    for z in range(n):
        # (x y) z
        left_t = target[target, z]
        left_s = sign * sign[target, z]
        # x (y z)
        yz = target[:, z]
        right_t = target[:, yz]
        right_s = sign[:, yz] * sign[:, z][None, :]
        left_t = np.where(left_s == 0, n, left_t)
        right_t = np.where(right_s == 0, n, right_t)
        if not (np.array_equal(left_t, right_t) and np.array_equal(left_s, right_s)):
            bad = np.argwhere((left_t != right_t) | (left_s != right_s))[0]
            return False, f"associativity fails on {basis[bad[0]]}, {basis[bad[1]]}, {basis[z]}"

    for k in range(1, factors + 1):
        for l in range(k + 1, factors + 1):
            delta = model.diagonal_class(k, l)
            if delta * delta != (2 - 2 * genus) * (model.point(k) * model.point(l)):
                return False, f"Delta({k},{l})^2 != (2-2g) pt x pt"
            if not diagonal_transfer_holds(model, delta, k, l):
                return False, f"transfer identity fails for Delta({k},{l})"
    return True, ""


# -- formal group laws ---------------------------------------------------------------


@check
def fgl_laws(preset: str, degree: int) -> tuple[bool, str]:
    F = fgl.make_fgl(preset, degree)
    ring = F.series_ring(("x", "y", "z"))
    x, y, z = ring.gen("x"), ring.gen("y"), ring.gen("z")
    s = fgl.fgl_sum
    if not s(F, x, fgl.fgl_inverse(F, x)).is_zero():
        return False, "F(x, iota(x)) != 0"
    if s(F, s(F, x, y), z) != s(F, x, s(F, y, z)):
        return False, "not associative"
    if s(F, x, y) != s(F, y, x):
        return False, "not commutative"
    if s(F, x, ring.zero()) != x:
        return False, "0 is not a unit"
    return True, ""


# -- surface arithmetic ----------------------------------------------------------------


@check
def grr_chain(n: int, d: int, g: int) -> tuple[bool, str]:
    sc = surface_chern
    fi = sc.framed_invariants(n, d, g)
    closed_c2 = d + n * (n - 1) * (g - 1)
    closed_ch = sc.SurfaceClass(n, -n, n * (2 - 2 * g), -n * (1 - g) - d, g)
    ok = fi.c2 == closed_c2 and fi.ch == closed_ch and fi.c1_D == -n and fi.c1_f == n * (2 - 2 * g)
    ok = ok and sc.framed_ch_by_construction(n, d, g) == closed_ch and sc.c2_from_ch(fi.ch) == closed_c2
    # the general solve with b free
    for b in range(-3, 4):
        sol = sc.solve_torsion_pushforward(n, b, d, g)
        ok = ok and sol.a == -n and sol.c2 == d + (n - 1) * (n * (1 - g) - b)
    return ok, "" if ok else f"got c2={fi.c2}, ch={fi.ch}"


@check
def grr_identity(g: int) -> tuple[bool, str]:
    """pi_*(ch(E) td S) = (a+r, (r+a^2+2a)(1-g) + (a+1)b - c2) on an integer grid."""
    sc = surface_chern
    for r, a, b, c2 in product(range(0, 4), range(-3, 4), range(-3, 4), range(-2, 3)):
        got = sc.grr_chain(r, a, b, c2, g)
        want = (Fraction(a + r), Fraction((r + a * a + 2 * a) * (1 - g) + (a + 1) * b - c2))
        if got.as_tuple() != want:
            return False, f"(r,a,b,c2)=({r},{a},{b},{c2}): {got}"
    return True, ""


@check
def surface_ring(g: int) -> tuple[bool, str]:
    sc = surface_chern
    basis = [sc.SurfaceClass.unit(g), sc.SurfaceClass.D(g), sc.SurfaceClass.f(g), sc.SurfaceClass.point(g),
             sc.todd_surface(g)]
    for x, y in product(basis, repeat=2):
        if sc.surf_mul(x, y) != sc.surf_mul(y, x):
            return False, "not commutative"
    for x, y, z in product(basis, repeat=3):
        if sc.surf_mul(sc.surf_mul(x, y), z) != sc.surf_mul(x, sc.surf_mul(y, z)):
            return False, "not associative"
    for x in basis:
        if sc.surf_mul(sc.SurfaceClass.unit(g), x) != x:
            return False, "not unital"
    if sc.grr_pushforward(sc.todd_surface(g)) != sc.todd_curve(g):
        return False, "pi_* td S != td C"
    return True, ""


# -- parser --------------------------------------------------------------------------


def random_tree(rng: random.Random, depth: int = 4) -> expr.Node:
    """A random expression tree (no sh(...)) for round-trip testing."""
    E = expr
    if depth <= 0 or rng.random() < 0.3:
        choice = rng.randrange(7)
        if choice == 0:
            return E.Num(rng.randrange(0, 20))
        if choice == 1:
            return E.Sym(rng.choice(["t", "u1", "u2", "u3", "Z", "W"]))
        if choice == 2:
            k = rng.randrange(1, 4)
            return E.CurveClass("pt", k, 1)
        if choice == 3:
            return E.CurveClass(rng.choice("ab"), rng.randrange(1, 4), rng.randrange(1, 3))
        if choice == 4:
            k, l = rng.sample(range(1, 4), 2)
            return E.Diagonal((k, l))
        if choice == 5:
            bundle = E.LB.make(
                t=rng.randrange(-2, 3),
                slots={rng.randrange(1, 4): rng.randrange(-2, 3)},
                diagonals={tuple(rng.sample(range(1, 4), 2)): rng.randrange(-1, 2)},
            )
            return E.Euler(E.Monomial(bundle))
        return E.Diagonal(None)
    kind = rng.randrange(4)
    if kind == 0:
        return E.Neg(random_tree(rng, depth - 1))
    if kind == 1:
        return E.Pow(random_tree(rng, depth - 1), rng.randrange(-3, 4))
    return E.BinOp(rng.choice("+-*/"), random_tree(rng, depth - 1), random_tree(rng, depth - 1))


@check
def parser_round_trip(seed: int, count: int = 1000) -> tuple[bool, str]:
    rng = random.Random(seed)
    for n in range(count):
        tree = random_tree(rng)
        text = expr.to_string(tree)
        back = expr.parse(text)
        if back != tree or expr.to_string(back) != text:
            return False, f"#{n}: {text!r} reparsed as {expr.to_string(back)!r}"
    return True, ""


@check
def ring_print_round_trip(genus: int, theory: str) -> tuple[bool, str]:
    """Printing a ring element and parsing it back gives the same element; also JSON."""
    model = make_model(genus, 2, theory)
    samples = [
        "e(t*t2/t1*O(Delta(1,2)))",
        "e(t1^-1)^2 + u2/(u1 - u2)*Delta(1,2)",
        "(t + Delta(1,2))^-1",
    ]
    for src in samples:
        x = expr.evaluate(expr.parse(src), model)
        if expr.evaluate(expr.parse(str(x)), model) != x:
            return False, f"text round trip fails for {src}"
        if RingElement.from_json(x.to_json()) != x:
            return False, f"JSON round trip fails for {src}"
    return True, ""


# -- suites ------------------------------------------------------------------------------


def acceptance_tasks(criterion: int, seed: int = 0) -> list[Task]:
    """The task list behind each numbered acceptance criterion."""
    T = Task.of
    if criterion == 1:
        return [T("kernel_closed_form", genus=g) for g in range(4)]
    if criterion == 2:
        return [
            T("quadratic_relation", genus=g, theory=th, kernel=k, l1=a, l2=b)
            for th in THEORIES for k in KERNELS for g in range(3)
            for a in QUADRATIC_PROBES for b in QUADRATIC_PROBES
        ]
    if criterion == 3:
        return [T("genus_relation", genus=g, i=i, j=j) for g in range(3) for i in range(-1, 4) for j in range(i, 4)]
    if criterion == 4:
        return [
            T("derived_kernel", genus=g, theory=th, parts=str(c))
            for th in THEORIES for g in range(3) for d in range(1, 4) for c in quot_weights.compositions(d)
        ]
    if criterion == 5:
        return [
            T("rn_intertwines", genus=g, theory=th, k1=a, k2=b)
            for th in THEORIES for g in range(3) for a in range(-2, 3) for b in range(-2, 3)
        ]
    if criterion == 6:
        tasks = []
        for th in THEORIES:
            for k in KERNELS:
                for g in range(3):
                    tasks += associativity_probes(g, th, k, seed)
                    # canonical-form comparison where it is cheap
                    tasks.append(T("associativity", genus=g, theory=th, kernel=k, f="u1*pt(1)", h="1",
                                   k="u1^2", degrees="1,1,1", method="symbolic"))
                    if g <= 1:
                        tasks.append(T("associativity", genus=g, theory=th, kernel=k, f="u1", h="pt(1)",
                                       k="u1*u2", degrees="1,1,2", method="symbolic"))
        return tasks
    if criterion == 7:
        return [T("ring_model", genus=g, factors=d) for g in range(4) for d in range(1, 4)]
    if criterion == 8:
        return [T("fgl_laws", preset=p, degree=n) for p in fgl.PRESETS for n in range(2, 9)]
    if criterion == 9:
        return [T("grr_identity", g=g) for g in range(4)] + [
            T("grr_chain", n=n, d=d, g=g) for n in range(1, 6) for d in range(1, 6) for g in range(4)
        ]
    if criterion == 10:
        return [T("parser_round_trip", seed=seed, count=1000)]
    raise ValueError(f"no acceptance criterion {criterion}")


def selftest_tasks(seed: int = 0) -> list[Task]:
    """A quick pass over the invariants of every module."""
    T = Task.of
    tasks = [T("fgl_laws", preset=p, degree=n) for p in fgl.PRESETS for n in (3, 6)]
    tasks += [T("ring_model", genus=g, factors=d) for g in range(3) for d in (1, 2, 3)]
    tasks += [T("ring_print_round_trip", genus=g, theory=th) for g in (0, 1) for th in THEORIES]
    tasks += [T("kernel_closed_form", genus=g, factors=2) for g in range(3)]
    tasks += [
        T("quadratic_relation", genus=g, theory=th, kernel=k, l1="t1^-1", l2="t*t2^-1")
        for g in (0, 1) for th in THEORIES for k in KERNELS
    ]
    tasks += [T("genus_relation", genus=g, i=i, j=j) for g in (0, 1) for i, j in ((0, 0), (-1, 2))]
    tasks += [T("derived_kernel", genus=g, theory=th, parts=p) for g in (0, 1) for th in THEORIES
              for p in ("1,1", "1,2", "1,1,1")]
    tasks += [T("derived_kernel", genus=1, theory="additive", parts="1,1", normalised=1)]
    tasks += [T("tangent_counts", parts=p) for p in ("1", "1,1", "2,1", "1,1,1", "2,2")]
    tasks += [T("rn_intertwines", genus=g, theory=th, k1=a, k2=b) for g in (0, 1) for th in THEORIES
              for a, b in ((-1, 2), (1, 0))]
    for th in THEORIES:
        tasks += associativity_probes(1, th, "gcnorm", seed, per_pattern=1, exhaustive=False)
    tasks += [T("surface_ring", g=g) for g in range(3)]
    tasks += [T("grr_identity", g=1)] + [T("grr_chain", n=n, d=d, g=g) for n in (1, 3) for d in (1, 4) for g in (0, 2)]
    tasks += [T("parser_round_trip", seed=seed, count=200)]
    return tasks
