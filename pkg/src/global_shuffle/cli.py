"""Command-line interface: ``global-shuffle SUBCOMMAND [flags]``.

Exit codes: 0 when every identity holds, 1 when a residual is nonzero (the
residual is printed), 2 on usage or domain errors.  ``--json`` switches the
output to a single JSON document; the text output carries the same fields.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Sequence

from . import expr
from .curve_ring import NonInvertibleError, RingElement, is_symmetric, make_model
from .distributions import verify_quadratic
from .fgl import parse_theory
from .invariants import run_tasks, selftest_tasks
from .quot_weights import Composition, compare_kernel
from .shuffle import (
    KernelFunction,
    ShuffleElement,
    kernel_by_name,
    rn_inverse,
    rn_map,
    shuffle_product,
    verify_genus_relation,
)
from .surface_chern import framed_invariants

EXIT_OK, EXIT_RESIDUAL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# -- helpers -----------------------------------------------------------------------


def _parts(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"--parts expects comma-separated integers, got {text!r}") from None
    if not parts or any(p <= 0 for p in parts):
        raise UsageError(f"--parts entries must be positive, got {text!r}")
    return parts


def _kernel(text: str) -> KernelFunction:
    if text in ("gc", "gcnorm", "one"):
        return kernel_by_name(text)
    return expr.kernel_from_expression(text)


def _symbols(node) -> set[str]:
    """Names of every Sym node and every extra symbol inside an e(...) monomial."""
    out: set[str] = set()
    if isinstance(node, expr.Sym):
        out.add(node.name)
    elif isinstance(node, expr.Euler):
        out.update(name for name, _ in node.monomial.bundle.extras)
    elif dataclasses.is_dataclass(node):
        for f in dataclasses.fields(node):
            value = getattr(node, f.name)
            if dataclasses.is_dataclass(value):
                out |= _symbols(value)
    return out


def _extras(trees, theory: str) -> tuple[str, ...]:
    reserved = set(parse_theory(theory).beta_names) | {"t"}
    names = set()
    for tree in trees:
        names |= {s for s in _symbols(tree) if s not in reserved and not expr._SLOT.match(s)}
    return tuple(sorted(names))


def _model(args, trees, factors: int):
    return make_model(args.genus, factors, args.theory, _extras(trees, args.theory))


def _factors_for(args, tree) -> int:
    if args.factors is not None:
        return args.factors
    if args.parts is not None:
        return sum(_parts(args.parts))
    return max(1, expr.max_slot(tree))


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _symmetric_element(x: RingElement, what: str) -> ShuffleElement:
    if not is_symmetric(x):
        raise UsageError(f"{what} is not symmetric in its {x.model.factors} factors")
    return ShuffleElement(x, True)


# -- subcommands ------------------------------------------------------------------------


def cmd_eval(args) -> int:
    tree = expr.parse(args.expr)
    model = _model(args, [tree], _factors_for(args, tree))
    value = expr.evaluate(tree, model, parts=_parts(args.parts), kernel=_kernel(args.kernel))
    _emit(args, {"expr": expr.to_string(tree), "value": value.to_json()}, [str(value)])
    return EXIT_OK


def cmd_shuffle(args) -> int:
    tf, th = expr.parse(args.f), expr.parse(args.h)
    parts = _parts(args.parts)
    if parts is not None and len(parts) != 2:
        raise UsageError("shuffle takes --parts d1,d2")
    d1, d2 = parts if parts else (max(1, expr.max_slot(tf)), max(1, expr.max_slot(th)))
    base = _model(args, [tf, th], d1)
    f = _symmetric_element(expr.evaluate(tf, base), "F")
    h = _symmetric_element(expr.evaluate(th, base.with_factors(d2)), "H")
    value = shuffle_product(f, h, _kernel(args.kernel), jobs=args.jobs)
    _emit(args, {"degree": value.degree, "kernel": args.kernel, "value": value.value.to_json()}, [str(value.value)])
    return EXIT_OK


def cmd_verify_quadratic(args) -> int:
    l1, l2 = expr.parse_line_bundle(args.l1), expr.parse_line_bundle(args.l2)
    res = verify_quadratic(l1, l2, _kernel(args.kernel), args.genus, args.theory)
    payload = {"holds": res.holds, "l1": str(l1), "l2": str(l2), "residual": res.residual.to_json()}
    lines = ["holds" if res.holds else f"residual: {res.residual}"]
    _emit(args, payload, lines)
    return EXIT_OK if res.holds else EXIT_RESIDUAL


def cmd_verify_genus_relation(args) -> int:
    model = make_model(args.genus, 2, args.theory)
    res = verify_genus_relation(args.i, args.j, model, reading=args.reading, jobs=args.jobs)
    payload = {"holds": res.holds, "i": args.i, "j": args.j, "reading": args.reading,
               "residual": res.residual.to_json()}
    _emit(args, payload, ["holds" if res.holds else f"residual: {res.residual}"])
    return EXIT_OK if res.holds else EXIT_RESIDUAL


def cmd_derive_kernel(args) -> int:
    if args.parts is None:
        raise UsageError("derive-kernel needs --parts")
    c = Composition(_parts(args.parts))
    res = compare_kernel(c, make_model(args.genus, c.degree, args.theory), args.normalised)
    payload = {"parts": list(c.parts), "normalised": args.normalised, "equal": res.equal,
               "derived": res.derived.to_json(), "kernel": res.closed_form.to_json()}
    lines = [f"derived: {res.derived}", f"kernel: {res.closed_form}", f"equal: {str(res.equal).lower()}"]
    _emit(args, payload, lines)
    return EXIT_OK if res.equal else EXIT_RESIDUAL


def cmd_rn(args) -> int:
    tree = expr.parse(args.expr)
    model = _model(args, [tree], _factors_for(args, tree))
    f = _symmetric_element(expr.evaluate(tree, model), "the argument")
    value = rn_map(f) if args.direction == "apply" else rn_inverse(f)
    _emit(args, {"direction": args.direction, "value": value.value.to_json()}, [str(value.value)])
    return EXIT_OK


def cmd_chern(args) -> int:
    inv = framed_invariants(args.n, args.d, args.g)
    payload = inv.to_json()
    lines = [f"rank: {inv.rank}", f"c1: {payload['c1_D']}*D + {payload['c1_f']}*f",
             f"c2: {payload['c2']}", f"ch: {inv.ch}"]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_tasks(selftest_tasks(args.seed), jobs=args.jobs)
    failed = sum(not r.ok for r in results)
    payload = {"seed": args.seed, "total": len(results), "failed": failed,
               "results": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results]}
    lines = [r.line() for r in results] + [f"{len(results) - failed}/{len(results)} checks passed"]
    _emit(args, payload, lines)
    return EXIT_OK if failed == 0 else EXIT_RESIDUAL


# -- argument parsing ---------------------------------------------------------------------


def _theory(text: str) -> str:
    try:
        parse_theory(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=0)
    common.add_argument("--theory", type=_theory, default="additive",
                        help="additive, multiplicative or universal[:N]")
    common.add_argument("--factors", type=int, default=None, help="number of curve factors d")
    common.add_argument("--parts", default=None, help="block sizes d1,d2[,...]")
    common.add_argument("--kernel", default="gc", help="gc, gcnorm, one, or an expression in z and Delta")
    common.add_argument("--json", action="store_true", help="emit a single JSON document")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized probe sets")
    common.add_argument("--jobs", type=int, default=1, help="parallelism width")

    parser = argparse.ArgumentParser(prog="global-shuffle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("shuffle", parents=[common], help="shuffle product of two symmetric elements")
    p.add_argument("f")
    p.add_argument("h")
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("verify-quadratic", parents=[common], help="quadratic relation of E_L1, E_L2")
    p.add_argument("--l1", required=True)
    p.add_argument("--l2", required=True)
    p.set_defaults(func=cmd_verify_quadratic)

    p = sub.add_parser("verify-genus-relation", parents=[common], help="cubic relation of e_i, e_j")
    p.add_argument("i", type=int)
    p.add_argument("j", type=int)
    p.add_argument("--reading", choices=("dual", "direct"), default="dual")
    p.set_defaults(func=cmd_verify_genus_relation)

    p = sub.add_parser("derive-kernel", parents=[common], help="kernel from localization weights")
    p.add_argument("--normalised", action="store_true")
    p.set_defaults(func=cmd_derive_kernel)

    p = sub.add_parser("rn", parents=[common], help="the renormalization map and its inverse")
    p.add_argument("direction", choices=("apply", "invert"))
    p.add_argument("expr")
    p.set_defaults(func=cmd_rn)

    p = sub.add_parser("chern", parents=[common], help="invariants of the framed sheaf")
    p.add_argument("n", type=int)
    p.add_argument("d", type=int)
    p.add_argument("g", type=int)
    p.set_defaults(func=cmd_chern)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except expr.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except (expr.EvaluationError, NonInvertibleError, ZeroDivisionError, UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
