"""Random valid derivations over the built-in theories, and single-node mutations.

Every rewrite here is written out by hand per axiom rather than derived
from the checker's pattern matcher, so the checker is tested against an
independent description of each schema.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from gradedsem.metric import MANHATTAN, SUP, discrete_space, validate_metric
from gradedsem.quanteq.terms import Op, Var, common_depth, uniform_depth_term
from gradedsem.quanteq.theory import DerivationTree, Judgement, build_trace_theory

VARS = ["x", "y", "z"]
GRID = [0.0, 0.25, 0.5, 0.75, 1.0]


def random_theory(rng, base):
    if base == "fuzzy":
        L = discrete_space(["a", "b"])
        return build_trace_theory(base, L, SUP)
    v = float(rng.choice([0.25, 0.5, 0.75]))
    L = validate_metric(["a", "b"], [[0, v], [v, 0]])
    t = MANHATTAN if base == "dist" or rng.random() < 0.5 else SUP
    return build_trace_theory(base, L, t)


def random_context(rng):
    """A metric on the variables and the context listing all its distances."""
    pts = rng.integers(0, 5, size=(len(VARS), 1)) / 4
    d = np.abs(pts - pts.T)
    X = validate_metric(VARS, d)
    ctx = tuple((a, b, float(X.d(a, b))) for a in VARS for b in VARS if a != b)
    return X, ctx


def random_term(rng, T, n, size=3, exact=False):
    """Random term of uniform depth ``n`` (flexible constants allowed)."""
    base = T.base
    labels = list(T.labels.points)
    if n > 0 and (size <= 1 or rng.random() < 0.6):
        return Op(str(rng.choice(labels)), (random_term(rng, T, n - 1, size - 1, exact),))
    if n == 0 and (size <= 1 or rng.random() < 0.5):
        if base != "dist" and rng.random() < 0.15:
            return Op("zero")
        return Var(str(rng.choice(VARS)))
    sub = lambda: random_term(rng, T, n, size - 1, exact)  # noqa: E731
    if base == "dist":
        q = Fraction(int(rng.integers(0, 5)), 4) if exact else float(rng.choice(GRID))
        return Op("p", (sub(), sub()), q)
    if base == "fuzzy" and rng.random() < 0.4:
        r = Fraction(int(rng.integers(0, 5)), 4) if exact else float(rng.choice(GRID))
        return Op("sc", (sub(),), r)
    return Op("plus", (sub(), sub()))


class Gen:
    def __init__(self, rng, T, ctx):
        self.rng, self.T, self.ctx = rng, T, ctx
        self.labels = list(T.labels.points)

    def node(self, rule, lhs, rhs, eps, premises=(), **kw):
        return DerivationTree(rule, Judgement(self.ctx, lhs, rhs, eps), tuple(premises), **kw)

    def ax(self, axiom, lhs, rhs, eps=0.0, subst=None, premises=()):
        subst = subst or {}
        depth = None
        if subst:
            depths = [uniform_depth_term(t, self.T.signature) for t in subst.values()]
            depth = max(depths)
        return self.node("ax", lhs, rhs, eps, premises, axiom=axiom, subst=subst, subst_depth=depth)

    def sym(self, p):
        c = p.conclusion
        return self.node("sym", c.rhs, c.lhs, c.eps, (p,))

    def wk(self, p, eps):
        c = p.conclusion
        return self.node("wk", c.lhs, c.rhs, eps, (p,))

    # -- rewrites: each returns a proof of s =_e t for the given s, or None

    def rewrites(self, s):
        out = []
        T, base = self.T, self.T.base
        if isinstance(s, Var):
            for a, b, e in self.ctx:
                if a == s.name:
                    out.append(lambda a=a, b=b, e=e: self.node("assn", Var(a), Var(b), e))
            return out
        name, args = s.name, s.args
        if name == "plus":
            u, v = args
            out.append(lambda: self.ax("jsl.comm", s, Op("plus", (v, u)), subst={"x": u, "y": v}))
            if u == v:
                out.append(lambda: self.ax("jsl.idem", s, u, subst={"x": u}))
            if v == Op("zero"):
                out.append(lambda: self.ax("jsl.unit", s, u, subst={"x": u}))
            if isinstance(u, Op) and u.name == "plus":
                a1, a2 = u.args
                out.append(lambda: self.ax("jsl.assoc", s, Op("plus", (a1, Op("plus", (a2, v)))),
                                           subst={"x": a1, "y": a2, "z": v}))
            if base == "fuzzy" and all(isinstance(w, Op) and w.name == "sc" for w in args) and \
                    u.args[0] == v.args[0]:
                out.append(lambda: self.ax("sc.join", s, Op("sc", (u.args[0],), max(u.param, v.param)),
                                           subst={"x": u.args[0]}))
        if name == "sc":
            (u,), r = args, s.param
            if r == 1:
                out.append(lambda: self.ax("sc.one", s, u, subst={"x": u}))
            if r == 0:
                out.append(lambda: self.ax("sc.zero", s, Op("zero"), subst={"x": u}))
            if isinstance(u, Op) and u.name == "sc":
                out.append(lambda: self.ax("sc.comp", s, Op("sc", u.args, min(r, u.param)),
                                           subst={"x": u.args[0]}))
            if isinstance(u, Op) and u.name == "plus":
                a1, a2 = u.args
                out.append(lambda: self.ax("sc.plus", s, Op("plus", (Op("sc", (a1,), r), Op("sc", (a2,), r))),
                                           subst={"x": a1, "y": a2}))
            if u == Op("zero"):
                out.append(lambda: self.ax("sc.unit", s, u))
            out.append(lambda: self._sc_dist(s))
        if name == "p":
            u, v = args
            q = s.param
            if q == 1:
                out.append(lambda: self.ax("bary.one", s, u, subst={"x": u, "y": v}))
            if u == v:
                out.append(lambda: self.ax("bary.idem", s, u, subst={"x": u}))
            out.append(lambda: self.ax("bary.comm", s, Op("p", (v, u), 1 - q), subst={"x": u, "y": v}))
            if isinstance(u, Op) and u.name == "p" and q * u.param < 1:
                r = u.param
                a1, a2 = u.args
                rhs = Op("p", (a1, Op("p", (a2, v), q * (1 - r) / (1 - q * r))), q * r)
                out.append(lambda: self.ax("bary.assoc", s, rhs, subst={"x": a1, "y": a2, "z": v}))
            out.append(lambda: self._interp(s))
        if name in T.label_set:
            (u,) = args
            if u == Op("zero") and base != "dist":
                out.append(lambda: self.ax("lab.zero", s, u))
            if isinstance(u, Op) and u.name == "plus":
                a1, a2 = u.args
                out.append(lambda: self.ax("lab.plus", s, Op("plus", (Op(name, (a1,)), Op(name, (a2,)))),
                                           subst={"x": a1, "y": a2}))
            if isinstance(u, Op) and u.name == "sc":
                out.append(lambda: self.ax("lab.sc", s, Op("sc", (Op(name, u.args),), u.param),
                                           subst={"x": u.args[0]}))
            if isinstance(u, Op) and u.name == "p":
                a1, a2 = u.args
                out.append(lambda: self.ax("lab.p", s, Op("p", (Op(name, (a1,)), Op(name, (a2,))), u.param),
                                           subst={"x": a1, "y": a2}))
            out.append(lambda: self._lab_dist(s))
        # reverse direction of the expanding axioms
        if base != "dist":
            out.append(lambda: self.sym(self.ax("jsl.idem", Op("plus", (s, s)), s, subst={"x": s})))
        if base == "fuzzy":
            out.append(lambda: self.sym(self.ax("sc.one", Op("sc", (s,), 1.0), s, subst={"x": s})))
        if base == "dist":
            w = float(self.rng.choice(GRID))
            out.append(lambda: self.sym(self.ax("bary.idem", Op("p", (s, s), w), s, subst={"x": s})))
        return out

    def _sc_dist(self, s):
        (u,), r = s.args, s.param
        p = self.prove(u, 1)
        if p is None:
            return None
        e = p.conclusion.eps
        choices = [g for g in GRID if abs(g - r) <= e + 1e-12]
        r2 = float(self.rng.choice(choices))
        v = p.conclusion.rhs
        return self.ax("sc.dist", s, Op("sc", (v,), r2), e, subst={"x": u, "y": v}, premises=(p,))

    def _interp(self, s):
        u, v = s.args
        q = s.param
        p1, p2 = self.prove(u, 1), self.prove(v, 1)
        if p1 is None or p2 is None:
            return None
        c1, c2 = p1.conclusion, p2.conclusion
        e = q * c1.eps + (1 - q) * c2.eps
        return self.ax("bary.interp", s, Op("p", (c1.rhs, c2.rhs), q), e,
                       subst={"x": u, "y": c1.rhs, "x'": v, "y'": c2.rhs}, premises=(p1, p2))

    def _lab_dist(self, s):
        (u,) = s.args
        p = self.prove(u, 1)
        if p is None:
            return None
        b = str(self.rng.choice(self.labels))
        e = p.conclusion.eps
        eps = float(self.T.tensor.k(self.T.labels.d(s.name, b), e))
        v = p.conclusion.rhs
        return self.ax("lab.dist", s, Op(b, (v,)), eps, subst={"x": u, "y": v}, premises=(p,))

    def _nexp(self, s):
        if not isinstance(s, Op) or not s.args:
            return None
        ps = [self.prove(a, 1) for a in s.args]
        if any(p is None for p in ps):
            return None
        e = max(p.conclusion.eps for p in ps)
        ps = [p if p.conclusion.eps == e else self.wk(p, e) for p in ps]
        rhs = Op(s.name, tuple(p.conclusion.rhs for p in ps), s.param)
        return self.node("nexp", s, rhs, e, ps)

    def prove(self, s, budget=3):
        """A random proof of ``s =_e t`` for some ``t`` of the same depth."""
        rng = self.rng
        for _ in range(8):
            roll = rng.random()
            if budget <= 0 or roll < 0.1:
                p = self.node("refl", s, s, 0.0)
            elif roll < 0.2:
                first = self.prove(s, budget - 1)
                second = self.prove(first.conclusion.rhs, budget - 1)
                e = min(first.conclusion.eps + second.conclusion.eps, 1.0)
                p = self.node("triang", s, second.conclusion.rhs, e, (first, second))
            elif roll < 0.28:
                p = self.prove(s, budget - 1)
                p = self.wk(p, min(1.0, p.conclusion.eps + float(rng.choice([0.0, 0.25, 0.5]))))
            elif roll < 0.4:
                p = self._nexp(s)
            else:
                opts = self.rewrites(s)
                p = opts[int(rng.integers(len(opts)))]() if opts else None
            if p is None:
                continue
            c = p.conclusion
            if common_depth(c.lhs, c.rhs, self.T.signature) is not None:
                return p
        return self.node("refl", s, s, 0.0)


def random_proof(rng, base=None):
    base = base or str(rng.choice(["powerset", "fuzzy", "dist"]))
    T = random_theory(rng, base)
    X, ctx = random_context(rng)
    n = int(rng.integers(0, 3))
    s = random_term(rng, T, n)
    return T, X, Gen(rng, T, ctx).prove(s)


# ---------------------------------------------------------------------------
# mutations


def mutate(rng, proof):
    """Corrupt one node; return (mutated proof, path of the corrupted node)."""
    paths = list(proof.paths())
    for _ in range(50):
        path = paths[int(rng.integers(len(paths)))]
        node = proof.node(path)
        c = node.conclusion
        kind = int(rng.integers(3))
        if kind == 0:
            bad = Judgement(c.ctx, c.lhs, Var("fresh"), c.eps)
        elif kind == 1:
            if node.rule == "wk":
                prem = node.premises[0].conclusion.eps
                if prem < 0.1:
                    continue
                eps = prem - 0.1
            else:
                eps = c.eps + 0.1 if c.eps <= 0.9 else c.eps - 0.1
            bad = Judgement(c.ctx, c.lhs, c.rhs, eps)
        else:
            new = DerivationTree("arch", c, node.premises, node.axiom, node.subst, node.subst_depth)
            return proof.replace(path, new), path
        new = DerivationTree(node.rule, bad, node.premises, node.axiom, node.subst, node.subst_depth)
        return proof.replace(path, new), path
    raise RuntimeError("no mutation applied")
