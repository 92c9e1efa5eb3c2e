"""Depth-n behaviours of states and the behavioural distances between them.

A behaviour at depth ``n`` is a lifted value over words of length ``n``:
a set of traces, a fuzzy set of traces, a trace distribution, or the
length-``n`` prefix of a stream. Words are tuples of labels.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import SemanticsMismatch, SizeError
from .liftings import (
    DIST,
    FUZZY,
    SET,
    FinDist,
    FuzzySet,
    fuzzy_hausdorff_distance,
    hausdorff_distance,
    kantorovich_distance,
    lift_map,
)
from .metric import DEFAULT_SIZE_CAP, MANHATTAN, SUP, TensorKind, word_distance
from .systems import FUZZY_LTS, METRIC_TS, PROB_TS, STREAM, Coalgebra

METRIC_TRACE = "metric_trace"
FUZZY_TRACE = "fuzzy_trace"
PROB_TRACE = "prob_trace"
STREAM_BRANCHING = "stream_branching"
SEMANTICS = (METRIC_TRACE, FUZZY_TRACE, PROB_TRACE, STREAM_BRANCHING)

SYSTEM_OF = {METRIC_TRACE: METRIC_TS, FUZZY_TRACE: FUZZY_LTS, PROB_TRACE: PROB_TS, STREAM_BRANCHING: STREAM}
SEMANTICS_OF = {v: k for k, v in SYSTEM_OF.items()}
TENSOR_OF = {METRIC_TRACE: SUP, FUZZY_TRACE: SUP, PROB_TRACE: MANHATTAN, STREAM_BRANCHING: SUP}


def check_semantics(c: Coalgebra, sem: str) -> None:
    if sem not in SYSTEM_OF:
        raise SemanticsMismatch(f"unknown semantics {sem!r}")
    if SYSTEM_OF[sem] != c.kind:
        raise SemanticsMismatch(f"{sem} needs a {SYSTEM_OF[sem]} system, got {c.kind}")


@dataclass(frozen=True)
class BehaviourAggregate:
    semantics: str
    depth: int
    value: object

    def words(self):
        v = self.value
        if self.semantics == STREAM_BRANCHING:
            return [v]
        return list(v.support()) if hasattr(v, "support") else list(v)


def kleisli_step(kind: str, t: TensorKind | None, a, v):
    """Pair every support element of ``v`` with ``a``; weights are unchanged.

    ``t`` only fixes the metric in which the result is measured (see
    :func:`kleisli_distance`); the value itself does not depend on it.
    """
    return lift_map(kind, lambda x: (a, x), v)


def kleisli_distance(kind: str, t: TensorKind, L, X, a, v, b, w) -> tuple[float, float]:
    """``(d((a, v), (b, w)), d(lambda(a, v), lambda(b, w)))`` for a label space ``L``.

    The first distance is taken in ``L (x) T X`` and the second in
    ``T(L (x) X)``, both combined with the tensor ``t``.
    """
    from .liftings import lifted_distance

    dX = X.d if hasattr(X, "d") else X
    dL = L.d if hasattr(L, "d") else L

    def pair_d(p, q):
        return float(t.k(dL(p[0], q[0]), dX(p[1], q[1])))

    before = float(t.k(dL(a, b), lifted_distance(kind, v, w, dX)))
    after = lifted_distance(kind, kleisli_step(kind, t, a, v), kleisli_step(kind, t, b, w), pair_d)
    return before, after


def _step(sem, c: Coalgebra, x, prev):
    """One unfolding: behaviour of ``x`` at depth n+1 from depth-n behaviours."""
    succ = c.successors(x)
    if sem == METRIC_TRACE:
        return frozenset((a,) + w for (a, y), _ in succ for w in prev[y])
    if sem == FUZZY_TRACE:
        return FuzzySet([((a,) + w, min(m, n)) for (a, y), m in succ for w, n in prev[y].items()])
    if sem == PROB_TRACE:
        return FinDist([((a,) + w, p * q) for (a, y), p in succ for w, q in prev[y].items()])
    (a, y), _ = next(iter(succ))
    return (a,) + prev[y]


def _unit(sem):
    if sem == METRIC_TRACE:
        return frozenset([()])
    if sem == FUZZY_TRACE:
        return FuzzySet({(): 1})
    if sem == PROB_TRACE:
        return FinDist({(): 1})
    return ()


def behaviour_layers(c: Coalgebra, sem: str, n: int) -> list[dict]:
    """Raw behaviours for depths ``0..n``: ``layers[k][state]``."""
    check_semantics(c, sem)
    if n < 0:
        raise ValueError("depth must be non-negative")
    layer = {x: _unit(sem) for x in c.states}
    layers = [layer]
    for _ in range(n):
        layer = {x: _step(sem, c, x, layer) for x in c.states}
        layers.append(layer)
    return layers


def behaviour_map(c: Coalgebra, sem: str, n: int) -> dict:
    """``state -> BehaviourAggregate`` at depth ``n``."""
    layer = behaviour_layers(c, sem, n)[-1]
    return {x: BehaviourAggregate(sem, n, v) for x, v in layer.items()}


def _word_metric(c: Coalgebra, sem: str, tensor: TensorKind | None):
    if sem == FUZZY_TRACE:
        # fuzzy trace semantics measures words in the discrete metric
        return lambda w, v: 0.0 if w == v else 1.0
    t = tensor or TENSOR_OF[sem]
    L = c.labels
    return lru_cache(maxsize=None)(lambda w, v: word_distance(L, t, w, v))


def _aggregate_distance(sem, u, v, dw, cap):
    if sem == METRIC_TRACE:
        return hausdorff_distance(u, v, dw)
    if sem == FUZZY_TRACE:
        return fuzzy_hausdorff_distance(u, v, dw)
    if sem == PROB_TRACE:
        if len(u) * len(v) > cap:
            raise SizeError(f"transport problem {len(u)}x{len(v)} exceeds cap {cap}")
        return kantorovich_distance(u, v, dw)[0]
    return dw(u, v)


def depth_distance(c: Coalgebra, sem: str, x, y, n: int, tensor: TensorKind | None = None,
                   cap: int = DEFAULT_SIZE_CAP) -> float:
    """Distance between the depth-``n`` behaviours of ``x`` and ``y``.

    Words are compared lazily with the semantics' tensor (or ``tensor``);
    ``L^n`` is never enumerated.
    """
    layer = behaviour_layers(c, sem, n)[-1]
    return _aggregate_distance(sem, layer[x], layer[y], _word_metric(c, sem, tensor), cap)


@dataclass(frozen=True)
class BehaviouralDistance:
    """Per-depth distances ``d_0 .. d_N`` and their running maximum.

    ``max`` is a lower bound for the supremum over all depths; the per-depth
    values need not be monotone, so ``argmax`` is the first depth where the
    maximum is reached.
    """

    per_depth: tuple
    max: float
    argmax: int

    @property
    def running_max(self) -> tuple:
        out, best = [], 0.0
        for d in self.per_depth:
            best = max(best, d)
            out.append(best)
        return tuple(out)


def behavioural_distance(c: Coalgebra, sem: str, x, y, N: int, tensor: TensorKind | None = None,
                         cap: int = DEFAULT_SIZE_CAP) -> BehaviouralDistance:
    layers = behaviour_layers(c, sem, N)
    dw = _word_metric(c, sem, tensor)
    vals = tuple(_aggregate_distance(sem, lay[x], lay[y], dw, cap) for lay in layers)
    best = max(vals)
    return BehaviouralDistance(vals, best, vals.index(best))


def all_pairs_distance(c: Coalgebra, sem: str, N: int, tensor: TensorKind | None = None) -> dict:
    """``(x, y) -> BehaviouralDistance`` for all unordered state pairs."""
    layers = behaviour_layers(c, sem, N)
    dw = _word_metric(c, sem, tensor)
    out = {}
    for i, x in enumerate(c.states):
        for y in c.states[i + 1:]:
            vals = tuple(_aggregate_distance(sem, lay[x], lay[y], dw, DEFAULT_SIZE_CAP) for lay in layers)
            best = max(vals)
            out[(x, y)] = BehaviouralDistance(vals, best, vals.index(best))
    return out


def binarize_distribution(pi: FinDist) -> FinDist:
    """Split each atom ``p (a, v)`` into ``p v (a, 1) + p (1 - v) (a, 0)``."""
    atoms = []
    for (a, v), p in pi.items():
        atoms.append(((a, 1), p * v))
        atoms.append(((a, 0), p * (1 - v)))
    return FinDist(atoms)
