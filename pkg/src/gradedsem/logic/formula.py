"""Formula syntax: the truth constant, label modalities and propositional ops.

Concrete syntax::

    formula := "1" | "<" label ">" formula | op "(" args ")"

``addc``, ``subc`` and ``meetc`` take one leading numeric constant and
``aff`` takes two (``aff(p, q, phi)`` is ``p * phi + q``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from ..errors import DepthError, FormulaSyntaxError, WhitelistError

# name -> (arity, number of constants)
OP_SHAPES = {
    "or": (2, 0),
    "and": (2, 0),
    "neg": (1, 0),
    "addc": (1, 1),
    "subc": (1, 1),
    "meetc": (1, 1),
    "aff": (1, 2),
}
COMMUTATIVE = frozenset({"or", "and"})

WHITELISTS = {
    "metric_trace": frozenset({"or"}),
    "fuzzy_trace": frozenset({"or", "meetc"}),
    "prob_trace": frozenset({"aff", "neg"}),
    "stream_branching": frozenset({"or", "and", "neg", "addc", "subc"}),
}


def fmt_const(c) -> str:
    s = format(float(c), ".10g")
    return s


def check_params(op: str, params: tuple) -> None:
    if op == "aff":
        p, q = params
        if not (0 <= q <= 1 and 0 <= p + q <= 1):
            raise FormulaSyntaxError(f"aff({fmt_const(p)}, {fmt_const(q)}) does not map [0,1] into [0,1]")
    else:
        for c in params:
            if not (0 <= c <= 1):
                raise FormulaSyntaxError(f"constant {fmt_const(c)} of {op} outside [0, 1]")


def op_function(op: str, params: tuple) -> Callable:
    """Pointwise interpretation; works on floats and numpy arrays alike."""
    import numpy as np

    if op == "or":
        return np.maximum
    if op == "and":
        return np.minimum
    if op == "neg":
        return lambda x: 1 - x
    if op == "addc":
        c = params[0]
        return lambda x: np.minimum(x + c, 1.0)
    if op == "subc":
        c = params[0]
        return lambda x: np.maximum(x - c, 0.0)
    if op == "meetc":
        c = params[0]
        return lambda x: np.minimum(x, c)
    if op == "aff":
        p, q = params
        return lambda x: p * x + q
    raise FormulaSyntaxError(f"unknown operator {op!r}")


class Formula:
    """Base class; subclasses are immutable and hashable."""

    depth: int
    size: int

    def text(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.text()

    def key(self):
        """Enumeration order: depth, then size, then text."""
        return (self.depth, self.size, self.text())

    def __lt__(self, other):
        return self.key() < other.key()


@dataclass(frozen=True, eq=True)
class Const1(Formula):
    depth: int = field(default=0, init=False)
    size: int = field(default=1, init=False)

    def text(self):
        return "1"

    def __repr__(self):
        return "Const1()"


@dataclass(frozen=True, eq=True)
class Modal(Formula):
    label: str
    sub: Formula
    depth: int = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", self.sub.depth + 1)
        object.__setattr__(self, "size", self.sub.size + 1)

    def text(self):
        return f"<{self.label}>{self.sub.text()}"


@dataclass(frozen=True, eq=True)
class Prop(Formula):
    op: str
    params: tuple
    subs: tuple
    depth: int = field(init=False, compare=False, repr=False)
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.op not in OP_SHAPES:
            raise FormulaSyntaxError(f"unknown operator {self.op!r}")
        arity, nparams = OP_SHAPES[self.op]
        params, subs = tuple(self.params), tuple(self.subs)
        if len(subs) != arity or len(params) != nparams:
            raise FormulaSyntaxError(f"{self.op} takes {nparams} constant(s) and {arity} formula(s)")
        check_params(self.op, params)
        depths = {s.depth for s in subs}
        if len(depths) != 1:
            raise DepthError(f"no uniform depth: arguments of {self.op} have depths {sorted(depths)}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "subs", subs)
        object.__setattr__(self, "depth", depths.pop())
        object.__setattr__(self, "size", 1 + sum(s.size for s in subs))

    def text(self):
        args = [fmt_const(c) for c in self.params] + [s.text() for s in self.subs]
        return f"{self.op}({','.join(args)})"


TRUE = Const1()


def word_formula(word) -> Formula:
    """``<a1>...<an>1`` for a word ``(a1, ..., an)``."""
    phi: Formula = TRUE
    for a in reversed(tuple(word)):
        phi = Modal(a, phi)
    return phi


def formula_word(phi: Formula):
    """Inverse of :func:`word_formula`; ``None`` for formulas with props."""
    word = []
    while isinstance(phi, Modal):
        word.append(phi.label)
        phi = phi.sub
    return tuple(word) if isinstance(phi, Const1) else None


def ops_used(phi: Formula) -> set:
    if isinstance(phi, Modal):
        return ops_used(phi.sub)
    if isinstance(phi, Prop):
        out = {phi.op}
        for s in phi.subs:
            out |= ops_used(s)
        return out
    return set()


def labels_used(phi: Formula) -> set:
    if isinstance(phi, Modal):
        return {phi.label} | labels_used(phi.sub)
    if isinstance(phi, Prop):
        return set().union(*(labels_used(s) for s in phi.subs))
    return set()


def check_whitelist(phi: Formula, sem: str) -> None:
    allowed = WHITELISTS.get(sem)
    if allowed is None:
        raise WhitelistError(f"unknown semantics {sem!r}")
    bad = sorted(ops_used(phi) - allowed)
    if bad:
        raise WhitelistError(f"operator(s) {', '.join(bad)} not allowed under {sem}")


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<modal>[<⟨](?P<label>[^>⟩]+)[>⟩])|(?P<name>[A-Za-z_]\w*)|(?P<punct>[(),]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("num") is not None:
            out.append(("num", m.group("num")))
        elif m.group("modal") is not None:
            out.append(("modal", m.group("label").strip()))
        elif m.group("name") is not None:
            out.append(("name", m.group("name")))
        else:
            out.append((m.group("punct"), m.group("punct")))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", None)

    def take(self, kind=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            if float(val) != 1:
                raise FormulaSyntaxError(f"the only truth constant is 1, found {val}")
            return TRUE
        if kind == "modal":
            self.take()
            return Modal(val, self.formula())
        if kind == "name":
            self.take()
            if val not in OP_SHAPES:
                raise FormulaSyntaxError(f"unknown operator {val!r}")
            arity, nparams = OP_SHAPES[val]
            self.take("(")
            params, subs = [], []
            for k in range(nparams + arity):
                if k:
                    self.take(",")
                if k < nparams:
                    params.append(float(self.take("num")[1]))
                else:
                    subs.append(self.formula())
            self.take(")")
            return Prop(val, tuple(params), tuple(subs))
        raise FormulaSyntaxError(f"unexpected token {val!r}")


def parse_formula(text: str, sem: str | None = None) -> Formula:
    """Parse ``text``; with ``sem`` given, also enforce its operator whitelist."""
    p = _Parser(_tokenize(text))
    phi = p.formula()
    if p.peek()[0] != "eof":
        raise FormulaSyntaxError(f"trailing input after formula: {p.peek()[1]!r}")
    if sem is not None:
        check_whitelist(phi, sem)
    return phi
