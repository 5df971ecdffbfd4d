"""Parser and printer for ring, shuffle and kernel expressions.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | atom ('^' integer)?
    atom    := integer | 't' | 't'K | 'u'K | symbol | 'pt(' k ')' | 'a(' k ',' i ')'
             | 'b(' k ',' i ')' | 'Delta(' k ',' l ')' | 'Delta' | 'e(' monomial ')'
             | 'sh(' expr ',' expr ')' | '(' expr ')'
    monomial:= mfactor (('*' | '/') mfactor)*
    mfactor := ('1' | 't' | 't'K | 'z' | symbol | 'O(' divisor ')' | '(' monomial ')') ('^' integer)?
    divisor := ['-'] 'Delta' ['(' k ',' l ')']

``t`` is the dilation parameter e(t) and ``tK`` (or ``uK``) is e(t_K).  The
bare ``Delta`` and the monomial variable ``z`` only make sense inside a
kernel, where they refer to the slot pair the kernel is evaluated on.
Whitespace is ignored; names are case-sensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .curve_ring import LineBundleMonomial, RingElement, RingModel, euler, is_symmetric

LB = LineBundleMonomial


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"{message} at position {pos}" + (f": {src[:pos]}<here>{src[pos:]}" if src else ""))


class EvaluationError(ValueError):
    """Well-formed expression that does not make sense in the configured model."""


# -- syntax tree --------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    """t, u_K (written tK or uK), or an extra coefficient symbol."""

    name: str


@dataclass(frozen=True)
class CurveClass:
    kind: str  # "pt", "a", "b"
    factor: int
    index: int = 1


@dataclass(frozen=True)
class Diagonal:
    pair: tuple[int, int] | None  # None: the kernel's own pair


@dataclass(frozen=True)
class Euler:
    monomial: "Monomial"


@dataclass(frozen=True)
class Shuffle:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Monomial:
    """A line-bundle monomial; ``z`` and ``pair_diag`` are the kernel placeholders."""

    bundle: LineBundleMonomial
    z: int = 0
    pair_diag: int = 0

    def __str__(self) -> str:
        parts = [] if self.bundle.is_trivial() else [str(self.bundle)]
        if self.z:
            parts.append("z" if self.z == 1 else f"z^{self.z}")
        if self.pair_diag:
            parts.append("O(Delta)" if self.pair_diag == 1 else f"O(Delta)^{self.pair_diag}")
        return "*".join(parts) if parts else "1"

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.bundle * other.bundle, self.z + other.z, self.pair_diag + other.pair_diag)

    def __pow__(self, n: int) -> "Monomial":
        return Monomial(self.bundle ** n, self.z * n, self.pair_diag * n)


Node = Union[Num, Sym, CurveClass, Diagonal, Euler, Shuffle, Neg, BinOp, Pow]

# -- tokens ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
_SLOT = re.compile(r"[tu]([1-9]\d*)$")


@dataclass
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            out.append(Token("int", m.group(1), start))
        elif m.group(2) is not None:
            out.append(Token("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character {ch!r}", start, src)
            out.append(Token("op", ch, start))
        pos = m.end()
    out.append(Token("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.src)

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def integer(self, signed: bool = False) -> int:
        sign = 1
        if signed:
            if self.accept("-"):
                sign = -1
            elif self.accept("+"):
                pass
        if self.tok.kind != "int":
            raise self.error("expected an integer")
        return sign * int(self.advance().text)

    # expression level

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.accept("-"):
            return Neg(self.factor())
        node = self.atom()
        if self.accept("^"):
            node = Pow(node, self.integer(signed=True))
        return node

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return Num(int(tok.text))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind != "name":
            raise self.error(f"unexpected {tok.text or 'end of input'!r}")
        self.advance()
        name = tok.text
        if name == "pt":
            self.expect("(")
            k = self.integer()
            self.expect(")")
            return CurveClass("pt", k, 1)
        if name in ("a", "b"):
            self.expect("(")
            k = self.integer()
            self.expect(",")
            i = self.integer()
            self.expect(")")
            return CurveClass(name, k, i)
        if name == "Delta":
            if self.accept("("):
                k = self.integer()
                self.expect(",")
                l = self.integer()
                self.expect(")")
                return Diagonal((k, l))
            return Diagonal(None)
        if name == "e":
            self.expect("(")
            mono = self.monomial()
            self.expect(")")
            return Euler(mono)
        if name == "sh":
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return Shuffle(left, right)
        if name in ("O", "z"):
            raise self.error(f"{name!r} is only allowed inside e(...)", tok)
        return Sym(_canonical_symbol(name))

    # monomials

    def monomial(self) -> Monomial:
        node = self.mfactor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            rhs = self.mfactor()
            node = node * (rhs if op == "*" else rhs ** -1)
        return node

    def mfactor(self) -> Monomial:
        tok = self.tok
        if self.accept("("):
            node = self.monomial()
            self.expect(")")
        elif tok.kind == "int":
            if tok.text != "1":
                raise self.error("only 1 may appear as a constant in a monomial")
            self.advance()
            node = Monomial(LB())
        elif tok.kind == "name":
            self.advance()
            node = self._mono_name(tok)
        else:
            raise self.error(f"unexpected {tok.text or 'end of input'!r} in a monomial")
        if self.accept("^"):
            node = node ** self.integer(signed=True)
        return node

    def _mono_name(self, tok: Token) -> Monomial:
        name = tok.text
        if name == "t":
            return Monomial(LB.make(t=1))
        m = _SLOT.match(name)
        if m and name[0] == "t":
            return Monomial(LB.make(slots={int(m.group(1)): 1}))
        if name == "z":
            return Monomial(LB(), z=1)
        if name == "O":
            self.expect("(")
            sign = -1 if self.accept("-") else 1
            inner = self.tok
            if inner.kind != "name" or inner.text != "Delta":
                raise self.error("expected Delta inside O(...)")
            self.advance()
            if self.accept("("):
                k = self.integer()
                self.expect(",")
                l = self.integer()
                self.expect(")")
                self.expect(")")
                if k == l:
                    raise self.error("O(Delta(k,k)) is not a divisor", inner)
                return Monomial(LB.make(diagonals={(k, l): sign}))
            self.expect(")")
            return Monomial(LB(), pair_diag=sign)
        if name in ("Z", "W"):
            return Monomial(LB.make(extras={name: 1}))
        raise self.error(f"unknown monomial factor {name!r}", tok)


def _canonical_symbol(name: str) -> str:
    m = _SLOT.match(name)
    if m:
        return f"u{m.group(1)}"
    return name


def parse(src: str) -> Node:
    p = _Parser(src)
    if p.tok.kind == "end":
        raise p.error("empty expression")
    node = p.expr()
    if p.tok.kind != "end":
        raise p.error(f"unexpected {p.tok.text!r}")
    return node


def parse_monomial(src: str) -> Monomial:
    p = _Parser(src)
    node = p.monomial()
    if p.tok.kind != "end":
        raise p.error(f"unexpected {p.tok.text!r}")
    return node


def parse_line_bundle(src: str) -> LineBundleMonomial:
    mono = parse_monomial(src)
    if mono.z or mono.pair_diag:
        raise ParseError("z and the bare Delta are only allowed in kernels", 0, src)
    return mono.bundle


# -- printing -------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_string(node: Node) -> str:
    """Print a tree so that ``parse(to_string(node)) == node``."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, CurveClass):
        if node.kind == "pt":
            return f"pt({node.factor})"
        return f"{node.kind}({node.factor},{node.index})"
    if isinstance(node, Diagonal):
        return "Delta" if node.pair is None else f"Delta({node.pair[0]},{node.pair[1]})"
    if isinstance(node, Euler):
        return f"e({node.monomial})"
    if isinstance(node, Shuffle):
        return f"sh({to_string(node.left)}, {to_string(node.right)})"
    if isinstance(node, Neg):
        inner = to_string(node.arg)
        return f"-{inner}" if _is_primary(node.arg) or isinstance(node.arg, Neg) else f"-({inner})"
    if isinstance(node, Pow):
        base = to_string(node.base)
        if not _is_primary(node.base):
            base = f"({base})"
        return f"{base}^{node.exp}"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = to_string(node.left)
        if _prec_of(node.left) < prec:
            left = f"({left})"
        right = to_string(node.right)
        # operators are left-associative; a Neg on the right is always wrapped
        if _prec_of(node.right) <= prec or isinstance(node.right, Neg):
            right = f"({right})"
        return f"{left} {node.op} {right}" if prec == 1 else f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


def _is_primary(node: Node) -> bool:
    return isinstance(node, (Num, Sym, CurveClass, Diagonal, Euler, Shuffle))


def _prec_of(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 2
    return 3


# -- evaluation -----------------------------------------------------------------


@dataclass(frozen=True)
class KernelContext:
    """The monomial standing for ``z`` and the slot pair of a kernel evaluation."""

    z: LineBundleMonomial
    pair: tuple[int, int]


def _resolve(mono: Monomial, ctx: KernelContext | None) -> LineBundleMonomial:
    if (mono.z or mono.pair_diag) and ctx is None:
        raise EvaluationError("z and the bare Delta can only be used in a kernel expression")
    out = mono.bundle
    if mono.z:
        out = out * ctx.z ** mono.z
    if mono.pair_diag:
        out = out * LB.make(diagonals={ctx.pair: mono.pair_diag})
    return out


def _check_slots(model: RingModel, slots: Sequence[int]) -> None:
    for k in slots:
        if not 1 <= k <= model.factors:
            raise EvaluationError(f"slot {k} out of range for {model.factors} factors")


def evaluate(node: Node, model: RingModel, parts: Sequence[int] | None = None, kernel=None,
             context: KernelContext | None = None) -> RingElement:
    """Evaluate a tree in ``model``.

    ``sh(F, H)`` evaluates F and H in d1 and d2 factors (from ``parts``, or
    the largest slot each side mentions) and returns their shuffle product
    with ``kernel`` (default g_C).
    """
    ev = lambda n: evaluate(n, model, parts, kernel, context)  # noqa: E731
    if isinstance(node, Num):
        return model.scalar(node.value)
    if isinstance(node, Sym):
        if node.name == "t":
            return model.tau
        m = _SLOT.match(node.name)
        if m:
            _check_slots(model, [int(m.group(1))])
            return model.u(int(m.group(1)))
        if node.name not in model.field.index:
            raise EvaluationError(f"unknown symbol {node.name!r}")
        return model.var(node.name)
    if isinstance(node, CurveClass):
        _check_slots(model, [node.factor])
        if node.kind == "pt":
            return model.point(node.factor)
        if not 1 <= node.index <= model.genus:
            raise EvaluationError(f"class index {node.index} out of range for genus {model.genus}")
        return model.curve_class(node.kind, node.factor, node.index)
    if isinstance(node, Diagonal):
        pair = node.pair
        if pair is None:
            if context is None:
                raise EvaluationError("bare Delta outside a kernel expression")
            pair = context.pair
        _check_slots(model, pair)
        if pair[0] == pair[1]:
            raise EvaluationError("Delta(k,k) is not defined")
        return model.diagonal_class(*pair)
    if isinstance(node, Euler):
        bundle = _resolve(node.monomial, context)
        _check_slots(model, [k for k, _ in bundle.slots] + [k for p, _ in bundle.diagonals for k in p])
        for name, _ in bundle.extras:
            if name not in model.field.index:
                raise EvaluationError(f"unknown symbol {name!r}")
        return euler(model, bundle)
    if isinstance(node, Neg):
        return -ev(node.arg)
    if isinstance(node, Pow):
        return ev(node.base) ** node.exp
    if isinstance(node, BinOp):
        a, b = ev(node.left), ev(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Shuffle):
        return _evaluate_shuffle(node, model, parts, kernel)
    raise TypeError(f"not an expression node: {node!r}")


def max_slot(node: Node) -> int:
    """The largest slot index an expression mentions (0 if none)."""
    if isinstance(node, Sym):
        m = _SLOT.match(node.name)
        return int(m.group(1)) if m else 0
    if isinstance(node, CurveClass):
        return node.factor
    if isinstance(node, Diagonal):
        return max(node.pair) if node.pair else 0
    if isinstance(node, Euler):
        b = node.monomial.bundle
        return max([k for k, _ in b.slots] + [k for p, _ in b.diagonals for k in p] + [0])
    if isinstance(node, (Neg, Pow)):
        return max_slot(node.arg if isinstance(node, Neg) else node.base)
    if isinstance(node, BinOp):
        return max(max_slot(node.left), max_slot(node.right))
    if isinstance(node, Shuffle):
        return 0
    return 0


def _evaluate_shuffle(node: Shuffle, model: RingModel, parts, kernel) -> RingElement:
    from .shuffle import ShuffleElement, kernel_gc, shuffle_product

    d = model.factors
    if parts is not None and len(parts) == 2 and sum(parts) == d:
        d1, d2 = parts
    else:
        d1 = max(1, max_slot(node.left))
        d2 = d - d1
    if d1 < 1 or d2 < 1:
        raise EvaluationError(f"cannot split {d} factors for sh(...); pass --parts")
    f = evaluate(node.left, model.with_factors(d1), None, kernel)
    h = evaluate(node.right, model.with_factors(d2), None, kernel)
    for side, x in (("first", f), ("second", h)):
        if not is_symmetric(x):
            raise EvaluationError(f"{side} argument of sh(...) is not symmetric")
    g = kernel if kernel is not None else kernel_gc()
    return shuffle_product(ShuffleElement(f, True), ShuffleElement(h, True), g).value


def evaluate_string(src: str, model: RingModel, **kwargs) -> RingElement:
    return evaluate(parse(src), model, **kwargs)


def kernel_from_expression(src: str):
    """A KernelFunction whose rule evaluates ``src`` with z and Delta bound per pair."""
    from .shuffle import KernelFunction

    tree = parse(src)

    def rule(model: RingModel, z: LineBundleMonomial, pair: tuple[int, int]) -> RingElement:
        return evaluate(tree, model, context=KernelContext(z, pair))

    return KernelFunction(f"expr:{to_string(tree)}", rule)


def node_fraction(node: Node) -> Fraction | None:
    """The value of a constant tree, or None."""
    if isinstance(node, Num):
        return Fraction(node.value)
    if isinstance(node, Neg):
        v = node_fraction(node.arg)
        return None if v is None else -v
    if isinstance(node, BinOp):
        a, b = node_fraction(node.left), node_fraction(node.right)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b if b else None
    if isinstance(node, Pow):
        v = node_fraction(node.base)
        if v is None or (v == 0 and node.exp < 0):
            return None
        return v ** node.exp
    return None
