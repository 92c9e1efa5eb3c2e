"""Free-model semantics: terms of depth n as lifted values over ``L^n x X``.

A point of ``L^n x X`` is a pair ``(word, x)``. Variables are units at the
empty word, label operations prefix their label, and the base operations
act through the base monad (union, fuzzy join and meet action, convex
combination).
"""
from __future__ import annotations

from typing import Mapping

from ..errors import DepthMismatch
from ..liftings import FinDist, FuzzySet, lift_flatten, lift_map, lifted_distance
from .terms import Op, Var, common_depth, has_depth, substitute
from .theory import DIST_BASE, FUZZY_BASE, POWERSET, GradedTheory


def _interp(T: GradedTheory, t, base: str):
    if isinstance(t, Var):
        key = ((), t.name)
        if base == POWERSET:
            return frozenset([key])
        if base == FUZZY_BASE:
            return FuzzySet({key: 1})
        return FinDist({key: 1})
    name = t.name
    if name in T.label_set:
        inner = _interp(T, t.args[0], base)
        return lift_map(T.kind, lambda p: ((name,) + p[0], p[1]), inner)
    args = [_interp(T, a, base) for a in t.args]
    if name == "zero":
        return frozenset() if base == POWERSET else FuzzySet({})
    if name == "plus":
        if base == POWERSET:
            return args[0] | args[1]
        return FuzzySet(list(args[0].items()) + list(args[1].items()))
    if name == "sc":
        r = t.param
        return FuzzySet([(k, min(r, m)) for k, m in args[0].items()])
    if name == "p":
        q = t.param
        return FinDist([(k, q * w) for k, w in args[0].items()] + [(k, (1 - q) * w) for k, w in args[1].items()])
    raise DepthMismatch(f"operation {name!r} has no interpretation in the {base} base")


def free_model_interpret(T: GradedTheory, term, n: int, X=None):
    """Value of ``term`` in ``T(L^n x X)``; variables name points of ``X``."""
    T.signature.check(term)
    if not has_depth(term, n, T.signature):
        raise DepthMismatch(f"{term} does not have uniform depth {n}")
    if X is not None:
        missing = {v.name for v in _vars(term)} - set(X.points)
        if missing:
            raise DepthMismatch(f"variables {sorted(missing)} are not points of the carrier")
    return _interp(T, term, T.base)


def _vars(t):
    if isinstance(t, Var):
        yield t
    else:
        for a in t.args:
            yield from _vars(a)


def pair_distance(T: GradedTheory, X):
    """Distance on ``L^n x X``: fold the tensor over the word, ending in ``d_X``."""
    dX = X.d if hasattr(X, "d") else X
    dL, k = T.labels.d, T.tensor.k

    def d(p, q):
        (w, a), (v, b) = p, q
        if len(w) != len(v):
            return 1.0
        acc = dX(a, b)
        for l1, l2 in zip(reversed(w), reversed(v)):
            acc = float(k(dL(l1, l2), acc))
        return acc

    return d


def free_model_distance(T: GradedTheory, s, t, X) -> float:
    """Lifted distance between the free-model values of ``s`` and ``t``."""
    n = common_depth(s, t, T.signature)
    if n is None:
        raise DepthMismatch(f"{s} and {t} have no common uniform depth")
    u = free_model_interpret(T, s, n, X)
    v = free_model_interpret(T, t, n, X)
    return lifted_distance(T.kind, u, v, pair_distance(T, X))


def collapse(outer, inner: Mapping):
    """Substitute the depth-n terms ``inner`` into the layered term ``outer``."""
    return substitute(outer, inner)


def layered_interpret(T: GradedTheory, outer, inner: Mapping, k: int, n: int):
    """Interpret the layers separately and join them with the monad multiplication.

    ``outer`` has depth ``k`` over placeholder variables; each placeholder
    ``z`` stands for ``inner[z]`` of depth ``n``. The result lives at depth
    ``k + n`` and must equal ``free_model_interpret(collapse(outer, inner))``.
    """
    top = free_model_interpret(T, outer, k)
    lowers = {z: free_model_interpret(T, term, n) for z, term in inner.items()}

    def graft(p):
        word, z = p
        return lift_map(T.kind, lambda q: (word + q[0], q[1]), lowers[z])

    return lift_flatten(T.kind, lift_map(T.kind, graft, top))
