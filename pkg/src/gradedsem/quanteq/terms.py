"""Terms over a graded signature and their uniform depth.

Text syntax is prefix application: ``plus(a(x), b(y))``, ``p(0.5, x, y)``,
``sc(0.7, x)``. A bare identifier is a variable, except for the declared
constants (``zero``). Operators with a numeric parameter take it as the
first argument.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from ..errors import TermSyntaxError


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Op:
    name: str
    args: tuple = ()
    param: object = None

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return term_text(self)


Term = Var | Op

# operators whose first textual argument is a number
PARAM_OPS = {"p", "sc"}
CONSTANTS = {"zero"}


def fmt_num(x) -> str:
    if isinstance(x, str):
        return x
    if callable(x):
        return "<computed>"
    return format(float(x), ".12g")


def term_text(t) -> str:
    if isinstance(t, Var):
        return t.name
    parts = ([fmt_num(t.param)] if t.param is not None else []) + [term_text(a) for a in t.args]
    if not parts:
        return t.name
    return f"{t.name}({', '.join(parts)})"


def variables(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= variables(a)
    return out


def substitute(t, sigma: Mapping):
    """Replace variables by terms; names missing from ``sigma`` stay put."""
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    return Op(t.name, tuple(substitute(a, sigma) for a in t.args), t.param)


def subterms(t):
    yield t
    if isinstance(t, Op):
        for a in t.args:
            yield from subterms(a)


# ---------------------------------------------------------------------------
# parsing

_TOK = re.compile(r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][\w']*)|(?P<p>[(),]))")


def parse_term(text: str, constants=CONSTANTS, param_ops=PARAM_OPS):
    toks, pos, s = [], 0, text.strip()
    while pos < len(s):
        m = _TOK.match(s, pos)
        if not m or m.end() == pos:
            raise TermSyntaxError(f"unexpected character at offset {pos} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        toks.append((kind, m.group(kind)))
    i = 0

    def peek():
        return toks[i] if i < len(toks) else ("eof", None)

    def take(kind):
        nonlocal i
        tok = peek()
        ok = tok[0] == kind if kind in ("name", "num") else tok[1] == kind
        if not ok:
            raise TermSyntaxError(f"expected {kind!r}, found {tok[1]!r} in {text!r}")
        i += 1
        return tok[1]

    def term():
        name = take("name")
        if peek()[1] != "(":
            return Op(name) if name in constants else Var(name)
        take("(")
        param, args = None, []
        if name in param_ops:
            param = float(take("num"))
            if peek()[1] == ",":
                take(",")
            else:
                take(")")
                return Op(name, (), param)
        if peek()[1] != ")":
            args.append(term())
            while peek()[1] == ",":
                take(",")
                args.append(term())
        take(")")
        return Op(name, tuple(args), param)

    t = term()
    if peek()[0] != "eof":
        raise TermSyntaxError(f"trailing input in {text!r}")
    return t


# ---------------------------------------------------------------------------
# signatures and depth


@dataclass(frozen=True)
class OpSpec:
    arity: int
    depth: int
    param: bool = False


@dataclass(frozen=True)
class GradedSignature:
    ops: tuple  # (name, OpSpec) pairs

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def table(self) -> dict:
        return dict(self.ops)

    def spec(self, name) -> OpSpec | None:
        return self.table.get(name)

    def check(self, t) -> None:
        """Raise :class:`TermSyntaxError` unless ``t`` is arity-correct."""
        table = self.table
        for s in subterms(t):
            if isinstance(s, Var):
                continue
            sp = table.get(s.name)
            if sp is None:
                raise TermSyntaxError(f"unknown operation {s.name!r}")
            if len(s.args) != sp.arity:
                raise TermSyntaxError(f"{s.name} takes {sp.arity} argument(s), got {len(s.args)}")
            if sp.param != (s.param is not None):
                raise TermSyntaxError(f"{s.name} {'needs' if sp.param else 'takes no'} numeric parameter")
            if s.param is not None and not (0 <= s.param <= 1):
                raise TermSyntaxError(f"parameter {s.param} of {s.name} outside [0, 1]")


def _depth_profile(t, table):
    """``(lo, flexible)``: exactly ``lo`` when rigid, any ``n >= lo`` when flexible."""
    if isinstance(t, Var):
        return 0, False
    sp = table.get(t.name)
    if sp is None:
        raise TermSyntaxError(f"unknown operation {t.name!r}")
    if not t.args:
        return sp.depth, True
    rigid, flex_lo = set(), 0
    for a in t.args:
        prof = _depth_profile(a, table)
        if prof is None:
            return None
        lo, flexible = prof
        if flexible:
            flex_lo = max(flex_lo, lo)
        else:
            rigid.add(lo)
    if len(rigid) > 1:
        return None
    if rigid:
        n = rigid.pop()
        if n < flex_lo:
            return None
        return n + sp.depth, False
    return flex_lo + sp.depth, True


def uniform_depth_term(t, sig: GradedSignature):
    """Least uniform depth of ``t``, or ``None`` if it has none."""
    prof = _depth_profile(t, sig.table)
    return None if prof is None else prof[0]


def has_depth(t, n: int, sig: GradedSignature) -> bool:
    prof = _depth_profile(t, sig.table)
    if prof is None:
        return False
    lo, flexible = prof
    return n >= lo if flexible else n == lo


def common_depth(s, t, sig: GradedSignature):
    """Least ``n`` at which both terms have uniform depth, or ``None``."""
    ps, pt = _depth_profile(s, sig.table), _depth_profile(t, sig.table)
    if ps is None or pt is None:
        return None
    (ls, fs), (lt, ft) = ps, pt
    if fs and ft:
        return max(ls, lt)
    if fs:
        return lt if lt >= ls else None
    if ft:
        return ls if ls >= lt else None
    return ls if ls == lt else None
