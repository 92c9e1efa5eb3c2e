"""Built-in graded theories of labelled traces and the derivation checker.

A theory over a label space ``L`` has the depth-0 operations of its base
(join semilattice, join semilattice with a ``[0,1]``-meet action, or
barycentric algebra), one depth-1 unary operation per label, axioms saying
labels distribute over the base operations, and distance axioms
``x =_e y |- a(x) =_{k(d(a,b), e)} b(y)``.

Axioms are schemas. In patterns, operations named ``?a`` bind a label,
string parameters ``?q`` bind a number, and callable parameters are
computed from earlier bindings.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..errors import ArchUnsupported, DiscreteRequired, InvalidStep, TermSyntaxError
from ..liftings import DIST, FUZZY, SET
from ..metric import FinMetric, TensorKind
from .terms import GradedSignature, Op, OpSpec, Var, common_depth, has_depth

TOL = 1e-9

POWERSET, FUZZY_BASE, DIST_BASE = "powerset", "fuzzy", "dist"
BUILTIN_TAG = {POWERSET: "metric_trace_theory", FUZZY_BASE: "fuzzy_theory", DIST_BASE: "prob_theory"}
LIFTING = {POWERSET: SET, FUZZY_BASE: FUZZY, DIST_BASE: DIST}
RULES = ("refl", "sym", "triang", "wk", "nexp", "ax", "assn")


# ---------------------------------------------------------------------------
# judgements and proofs


@dataclass(frozen=True)
class Judgement:
    ctx: tuple  # (var, var, eps) triples
    lhs: object
    rhs: object
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "ctx", tuple((str(x), str(y), float(e)) for x, y, e in self.ctx))


@dataclass(frozen=True)
class DerivationTree:
    rule: str
    conclusion: Judgement
    premises: tuple = ()
    axiom: str | None = None
    subst: tuple = ()  # (var, term) pairs
    subst_depth: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        s = self.subst.items() if isinstance(self.subst, dict) else self.subst
        object.__setattr__(self, "subst", tuple(s))

    def node(self, path):
        t = self
        for i in path:
            t = t.premises[i]
        return t

    def paths(self, prefix=()):
        yield prefix
        for i, p in enumerate(self.premises):
            yield from p.paths(prefix + (i,))

    def replace(self, path, new: "DerivationTree") -> "DerivationTree":
        if not path:
            return new
        i, rest = path[0], path[1:]
        prem = list(self.premises)
        prem[i] = prem[i].replace(rest, new)
        return DerivationTree(self.rule, self.conclusion, tuple(prem), self.axiom, self.subst, self.subst_depth)


# ---------------------------------------------------------------------------
# axiom schemas


@dataclass(frozen=True)
class Axiom:
    id: str
    lhs: object
    rhs: object
    eps: object = 0.0  # number or callable(env)
    ctx: tuple = ()  # (var, var, eps binder name or number)
    side: Callable | None = None
    depth: int = 0

    def eps_value(self, env) -> float:
        return float(self.eps(env)) if callable(self.eps) else float(self.eps)


def _match(pat, term, env: dict, labels) -> bool:
    if isinstance(pat, Var):
        key = ("v", pat.name)
        if key in env:
            return env[key] == term
        env[key] = term
        return True
    if not isinstance(term, Op) or len(pat.args) != len(term.args):
        return False
    if pat.name.startswith("?"):
        if term.name not in labels or term.param is not None:
            return False
        key = ("l", pat.name[1:])
        if env.setdefault(key, term.name) != term.name:
            return False
    elif pat.name != term.name:
        return False
    if not _match_param(pat.param, term.param, env):
        return False
    return all(_match(p, t, env, labels) for p, t in zip(pat.args, term.args))


def _match_param(pp, tp, env) -> bool:
    if pp is None:
        return tp is None
    if tp is None:
        return False
    if isinstance(pp, str):
        key = ("p", pp.lstrip("?"))
        if key in env:
            return abs(env[key] - tp) <= TOL
        env[key] = tp
        return True
    if callable(pp):
        try:
            want = pp(env)
        except (KeyError, ZeroDivisionError):
            return False
        return abs(want - tp) <= TOL
    return abs(pp - tp) <= TOL


def P(env, name):
    return env[("p", name)]


def E(env, name):
    return env[("e", name)]


def L(env, name):
    return env[("l", name)]


x, y, z, x2, y2 = Var("x"), Var("y"), Var("z"), Var("x'"), Var("y'")
ZERO = Op("zero")


def plus(s, t):
    return Op("plus", (s, t))


def sc(r, s):
    return Op("sc", (s,), r)


def bary(q, s, t):
    return Op("p", (s, t), q)


def lab(name, s):
    return Op(name, (s,))


def _jsl_axioms():
    return [
        Axiom("jsl.assoc", plus(plus(x, y), z), plus(x, plus(y, z))),
        Axiom("jsl.comm", plus(x, y), plus(y, x)),
        Axiom("jsl.idem", plus(x, x), x),
        Axiom("jsl.unit", plus(x, ZERO), x),
    ]


def _fuzzy_axioms():
    return [
        Axiom("sc.one", sc(1.0, x), x),
        Axiom("sc.comp", sc("?r", sc("?s", x)), sc(lambda e: min(P(e, "r"), P(e, "s")), x)),
        Axiom("sc.zero", sc(0.0, x), ZERO),
        Axiom("sc.plus", sc("?r", plus(x, y)), plus(sc("?r", x), sc("?r", y))),
        Axiom("sc.unit", sc("?r", ZERO), ZERO),
        Axiom("sc.join", plus(sc("?r", x), sc("?s", x)), sc(lambda e: max(P(e, "r"), P(e, "s")), x)),
        Axiom("sc.dist", sc("?r", x), sc("?s", y), eps=lambda e: E(e, "e"), ctx=(("x", "y", "e"),),
              side=lambda e: abs(P(e, "r") - P(e, "s")) <= E(e, "e") + TOL),
    ]


def _bary_axioms():
    def assoc_outer(e):
        return P(e, "q") * P(e, "r")

    def assoc_inner(e):
        q, r = P(e, "q"), P(e, "r")
        return q * (1 - r) / (1 - q * r)

    return [
        Axiom("bary.one", bary(1.0, x, y), x),
        Axiom("bary.idem", bary("?q", x, x), x),
        Axiom("bary.comm", bary("?q", x, y), bary(lambda e: 1 - P(e, "q"), y, x)),
        Axiom("bary.assoc", bary("?q", bary("?r", x, y), z), bary(assoc_outer, x, bary(assoc_inner, y, z)),
              side=lambda e: P(e, "q") * P(e, "r") < 1 - TOL),
        Axiom("bary.interp", bary("?q", x, x2), bary("?q", y, y2),
              eps=lambda e: P(e, "q") * E(e, "e1") + (1 - P(e, "q")) * E(e, "e2"),
              ctx=(("x", "y", "e1"), ("x'", "y'", "e2"))),
    ]


def _label_axioms(base, labels: FinMetric, t: TensorKind):
    a = "?a"
    out = []
    if base in (POWERSET, FUZZY_BASE):
        out += [
            Axiom("lab.zero", lab(a, ZERO), ZERO, depth=1),
            Axiom("lab.plus", lab(a, plus(x, y)), plus(lab(a, x), lab(a, y)), depth=1),
        ]
    if base == FUZZY_BASE:
        out.append(Axiom("lab.sc", lab(a, sc("?r", x)), sc("?r", lab(a, x)), depth=1))
    if base == DIST_BASE:
        out.append(Axiom("lab.p", lab(a, bary("?q", x, y)), bary("?q", lab(a, x), lab(a, y)), depth=1))
    out.append(Axiom("lab.dist", lab("?a", x), lab("?b", y), ctx=(("x", "y", "e"),), depth=1,
                     eps=lambda e: float(t.k(labels.d(L(e, "a"), L(e, "b")), E(e, "e")))))
    return out


@dataclass(frozen=True)
class GradedTheory:
    base: str
    labels: FinMetric
    tensor: TensorKind
    signature: GradedSignature
    axioms: dict = field(compare=False)

    @property
    def builtin(self) -> str:
        return BUILTIN_TAG[self.base]

    @property
    def kind(self) -> str:
        return LIFTING[self.base]

    @property
    def label_set(self) -> frozenset:
        return frozenset(self.labels.points)


def build_trace_theory(base: str, labels: FinMetric, t: TensorKind) -> GradedTheory:
    """Theory of depth-n traces over ``labels`` for a base in {powerset, fuzzy, dist}."""
    if base not in BUILTIN_TAG:
        raise ValueError(f"unknown base theory {base!r}")
    if base == FUZZY_BASE and len(labels) > 1 and not labels.is_discrete:
        raise DiscreteRequired("the fuzzy theory needs a discrete label space")
    ops = []
    if base in (POWERSET, FUZZY_BASE):
        ops += [("plus", OpSpec(2, 0)), ("zero", OpSpec(0, 0))]
    if base == FUZZY_BASE:
        ops.append(("sc", OpSpec(1, 0, param=True)))
    if base == DIST_BASE:
        ops.append(("p", OpSpec(2, 0, param=True)))
    reserved = {name for name, _ in ops}
    for a in labels.points:
        if a in reserved or not isinstance(a, str) or not a.isidentifier():
            raise ValueError(f"label {a!r} cannot be used as an operation name")
        ops.append((a, OpSpec(1, 1)))
    axioms = []
    if base in (POWERSET, FUZZY_BASE):
        axioms += _jsl_axioms()
    if base == FUZZY_BASE:
        axioms += _fuzzy_axioms()
    if base == DIST_BASE:
        axioms += _bary_axioms()
    axioms += _label_axioms(base, labels, t)
    return GradedTheory(base, labels, t, GradedSignature(ops), {ax.id: ax for ax in axioms})


# ---------------------------------------------------------------------------
# checker


def _close(a, b) -> bool:
    return abs(a - b) <= TOL


def check_derivation(T: GradedTheory, proof: DerivationTree) -> bool:
    """Validate ``proof``; raise :class:`InvalidStep` at the first bad node.

    Nodes are checked children first (left to right), so a corrupted node
    is reported at its own path even though its parent is broken as well.
    """
    _check(T, proof, ())
    return True


def _check(T, node: DerivationTree, path):
    if node.rule == "arch":
        raise ArchUnsupported(path)
    for i, prem in enumerate(node.premises):
        _check(T, prem, path + (i,))
    fail = _node_problem(T, node)
    if fail:
        raise InvalidStep(path, fail)


def _node_problem(T, node: DerivationTree) -> str | None:
    if node.rule not in RULES:
        return f"unknown rule {node.rule!r}"
    j = node.conclusion
    if not (-TOL <= j.eps <= 1 + TOL):
        return f"distance {j.eps} outside [0, 1]"
    for side in (j.lhs, j.rhs):
        try:
            T.signature.check(side)
        except TermSyntaxError as e:
            return str(e)
    if common_depth(j.lhs, j.rhs, T.signature) is None:
        return "sides have no common uniform depth"
    for k, prem in enumerate(node.premises):
        if prem.conclusion.ctx != j.ctx:
            return f"premise {k} has a different context"
    return globals()["_rule_" + node.rule](T, node, j)


def _arity(node, n):
    if len(node.premises) != n:
        return f"rule {node.rule} needs {n} premise(s), got {len(node.premises)}"
    return None


def _rule_refl(T, node, j):
    if (bad := _arity(node, 0)):
        return bad
    if j.lhs != j.rhs:
        return "refl needs identical sides"
    if not _close(j.eps, 0):
        return f"refl concludes distance 0, not {j.eps}"
    return None


def _rule_sym(T, node, j):
    if (bad := _arity(node, 1)):
        return bad
    p = node.premises[0].conclusion
    if (p.lhs, p.rhs) != (j.rhs, j.lhs):
        return "sym must swap the premise sides"
    if not _close(p.eps, j.eps):
        return f"sym keeps the distance {p.eps}, got {j.eps}"
    return None


def _rule_triang(T, node, j):
    if (bad := _arity(node, 2)):
        return bad
    p, q = node.premises[0].conclusion, node.premises[1].conclusion
    if p.lhs != j.lhs or q.rhs != j.rhs:
        return "triang conclusion must join the outer sides of its premises"
    if p.rhs != q.lhs:
        return "triang premises do not share a middle term"
    want = min(p.eps + q.eps, 1.0)
    if not _close(j.eps, want):
        return f"triang distance must be {want:.6g}, got {j.eps:.6g}"
    return None


def _rule_wk(T, node, j):
    if (bad := _arity(node, 1)):
        return bad
    p = node.premises[0].conclusion
    if (p.lhs, p.rhs) != (j.lhs, j.rhs):
        return "wk must keep both sides"
    if j.eps < p.eps - TOL:
        return f"wk may only raise the distance ({p.eps} -> {j.eps})"
    return None


def _rule_nexp(T, node, j):
    s, t = j.lhs, j.rhs
    if not (isinstance(s, Op) and isinstance(t, Op)) or s.name != t.name or len(s.args) != len(t.args):
        return "nexp needs the same operation on both sides"
    if (s.param is None) != (t.param is None) or (s.param is not None and not _close(s.param, t.param)):
        return "nexp needs equal operation parameters"
    if (bad := _arity(node, len(s.args))):
        return bad
    for k, (prem, a, b) in enumerate(zip(node.premises, s.args, t.args)):
        c = prem.conclusion
        if (c.lhs, c.rhs) != (a, b):
            return f"premise {k} does not relate argument {k} of both sides"
        if not _close(c.eps, j.eps):
            return f"premise {k} has distance {c.eps}, expected {j.eps}"
    return None


def _rule_assn(T, node, j):
    if (bad := _arity(node, 0)):
        return bad
    if not (isinstance(j.lhs, Var) and isinstance(j.rhs, Var)):
        return "assn concludes a relation between variables"
    for a, b, e in j.ctx:
        if a == j.lhs.name and b == j.rhs.name and _close(e, j.eps):
            return None
    return f"{j.lhs.name} =_{j.eps} {j.rhs.name} is not in the context"


def _rule_ax(T, node, j):
    ax = T.axioms.get(node.axiom)
    if ax is None:
        return f"unknown axiom {node.axiom!r}"
    if (bad := _arity(node, len(ax.ctx))):
        return bad
    subst = dict(node.subst)
    n = node.subst_depth
    if subst and n is None:
        return "substitution needs a declared uniform depth"
    env = {("v", v): term for v, term in subst.items()}
    for k, ((a, b, e), prem) in enumerate(zip(ax.ctx, node.premises)):
        c = prem.conclusion
        if not (_match(Var(a), c.lhs, env, T.label_set) and _match(Var(b), c.rhs, env, T.label_set)):
            return f"premise {k} does not prove the substituted assumption {a} = {b}"
        if isinstance(e, str):
            env[("e", e)] = c.eps
        elif not _close(e, c.eps):
            return f"premise {k} must have distance {e}"
    if not _match(ax.lhs, j.lhs, env, T.label_set):
        return f"left side is not an instance of axiom {ax.id}"
    if not _match(ax.rhs, j.rhs, env, T.label_set):
        return f"right side is not an instance of axiom {ax.id}"
    bound = {k[1]: v for k, v in env.items() if k[0] == "v"}
    extra = set(subst) - bound.keys()
    if extra:
        return f"substitution mentions variables {sorted(extra)} absent from the axiom"
    if n is None:
        n = 0
    for v, term in bound.items():
        if not has_depth(term, n, T.signature):
            return f"substituted term for {v} does not have uniform depth {n}"
    if ax.side is not None and not ax.side(env):
        return f"side condition of axiom {ax.id} fails"
    want = ax.eps_value(env)
    if not _close(j.eps, want):
        return f"axiom {ax.id} yields distance {want:.6g}, got {j.eps:.6g}"
    return None
