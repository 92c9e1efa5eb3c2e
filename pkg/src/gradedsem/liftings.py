"""Finite powerset, distribution and fuzzy-powerset monads with their metrics.

Values:

* ``set``   -- a ``frozenset`` of points (Hausdorff distance),
* ``dist``  -- a :class:`FinDist` (Kantorovich distance, solved exactly),
* ``fuzzy`` -- a :class:`FuzzySet` (fuzzy Hausdorff distance).

Every distance function takes the ground distance either as a
:class:`~gradedsem.metric.FinMetric` or as any callable ``d(p, q)``, so
callers can supply distances lazily on large carriers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np

from .errors import SolverError
from .metric import TOL, clamp01, ominus
from .transport import solve_transport

SET, DIST, FUZZY = "set", "dist", "fuzzy"
KINDS = (SET, DIST, FUZZY)

CERT_GAP = 1e-7


def _fmt(x):
    return f"{float(x):.4g}"


class _WeightedSupport:
    """Immutable finite map point -> positive weight, hashable and comparable."""

    __slots__ = ("_w", "_hash")

    def __init__(self, weights: Mapping | Iterable):
        items = weights.items() if isinstance(weights, Mapping) else weights
        w = {}
        for p, x in items:
            w[p] = self._combine(w[p], x) if p in w else x
        self._w = {p: x for p, x in w.items() if x != 0}
        self._hash = None
        self._check()

    @staticmethod
    def _combine(a, b):
        return a + b

    def _check(self):
        pass

    def __getitem__(self, p):
        return self._w.get(p, 0)

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def __contains__(self, p):
        return p in self._w

    def items(self):
        return self._w.items()

    def support(self):
        return self._w.keys()

    def __eq__(self, other):
        return type(self) is type(other) and self._w == other._w

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self._w.items())))
        return self._hash


class FinDist(_WeightedSupport):
    """Finitely supported probability distribution (total, never a subdistribution)."""

    __slots__ = ()

    def _check(self):
        if not self._w:
            raise ValueError("a distribution needs non-empty support")
        for p, x in self._w.items():
            if x < 0:
                raise ValueError(f"negative weight {x} at {p!r}")
        total = sum(self._w.values())
        if abs(total - 1) > TOL:
            raise ValueError(f"mass {_fmt(total)} != 1")

    @classmethod
    def dirac(cls, x):
        return cls({x: 1})

    def __repr__(self):
        return " + ".join(f"{_fmt(p)}*{x!r}" for x, p in self._w.items())


class FuzzySet(_WeightedSupport):
    """Finite fuzzy set; zero memberships are dropped so equality is structural."""

    __slots__ = ()

    @staticmethod
    def _combine(a, b):
        return max(a, b)

    def _check(self):
        for p, x in self._w.items():
            if not (0 < x <= 1):
                raise ValueError(f"membership {x} of {p!r} outside (0, 1]")

    def __repr__(self):
        return "{" + ", ".join(f"{x!r}: {_fmt(m)}" for x, m in self._w.items()) + "}"


def _dfun(d) -> Callable:
    return d.d if hasattr(d, "d") else d


# ---------------------------------------------------------------------------
# distances


def hausdorff_distance(A: Iterable, B: Iterable, d) -> float:
    """Two-sided sup-inf distance; empty joins are 0 and empty meets are 1."""
    dist = _dfun(d)
    A, B = list(A), list(B)

    def one_side(P, Q):
        out = 0.0
        for p in P:
            out = max(out, min((dist(p, q) for q in Q), default=1.0))
        return out

    return clamp01(max(one_side(A, B), one_side(B, A)))


def _fuzzy_d0(A: FuzzySet, B: FuzzySet, dist) -> float:
    out = 0.0
    for x, ax in A.items():
        # a y outside supp(B) (x itself when x is not in B) contributes A(x),
        # an upper bound for every other term, so the meet over the whole
        # carrier is the meet over supp(B) capped at A(x)
        best = float(ax)
        for y, by in B.items():
            best = min(best, max(ominus(ax, by), min(ax, dist(x, y))))
        out = max(out, best)
    return out


def fuzzy_hausdorff_distance(A: FuzzySet, B: FuzzySet, d) -> float:
    dist = _dfun(d)
    return clamp01(max(_fuzzy_d0(A, B, dist), _fuzzy_d0(B, A, dist)))


@dataclass(frozen=True)
class TransportCertificate:
    """Optimal coupling plus a 1-Lipschitz dual potential of equal value."""

    coupling: dict
    potentials: dict
    primal: float
    dual: float

    @property
    def gap(self) -> float:
        return abs(self.primal - self.dual)

    def verify(self, mu: FinDist, nu: FinDist, d, tol: float = TOL, gap: float = CERT_GAP) -> list[str]:
        """Return a list of problems; empty when the certificate is sound."""
        dist = _dfun(d)
        problems = []
        for side, target, idx in (("left", mu, 0), ("right", nu, 1)):
            marg = {}
            for pair, g in self.coupling.items():
                marg[pair[idx]] = marg.get(pair[idx], 0.0) + g
            for p in set(marg) | set(target.support()):
                if abs(marg.get(p, 0.0) - float(target[p])) > tol:
                    problems.append(f"{side} marginal at {p!r}: {marg.get(p, 0.0)} vs {float(target[p])}")
        pts = list(self.potentials)
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                if abs(self.potentials[p] - self.potentials[q]) > dist(p, q) + tol:
                    problems.append(f"potential not 1-Lipschitz on ({p!r}, {q!r})")
        cost = sum(g * dist(x, y) for (x, y), g in self.coupling.items())
        if abs(cost - self.primal) > tol:
            problems.append(f"coupling cost {cost} != primal {self.primal}")
        if self.gap > gap:
            problems.append(f"duality gap {self.gap}")
        return problems


def kantorovich_distance(mu: FinDist, nu: FinDist, d) -> tuple[float, TransportCertificate]:
    """Optimal transport distance with ground cost ``d`` and its certificate.

    Raises :class:`SolverError` when the certificate does not check out.
    """
    dist = _dfun(d)
    xs, ys = list(mu.support()), list(nu.support())
    cost = np.array([[dist(x, y) for y in ys] for x in xs], dtype=float)
    flow, _u, v = solve_transport([float(mu[x]) for x in xs], [float(nu[y]) for y in ys], cost)
    coupling = {(xs[i], ys[j]): float(flow[i, j])
                for i in range(len(xs)) for j in range(len(ys)) if flow[i, j] > 1e-15}
    primal = float(np.sum(flow * cost))
    # c-transform of the column potentials: a single 1-Lipschitz test function
    union = list(dict.fromkeys(xs + ys))
    f = {z: min(dist(z, y) - float(v[j]) for j, y in enumerate(ys)) for z in union}
    dual = sum(float(mu[z]) * f[z] for z in xs) - sum(float(nu[z]) * f[z] for z in ys)
    cert = TransportCertificate(coupling, f, primal, float(dual))
    problems = cert.verify(mu, nu, dist)
    if problems:
        raise SolverError("; ".join(problems))
    return clamp01(primal), cert


def lifted_distance(kind: str, a, b, d) -> float:
    if kind == SET:
        return hausdorff_distance(a, b, d)
    if kind == DIST:
        return kantorovich_distance(a, b, d)[0]
    if kind == FUZZY:
        return fuzzy_hausdorff_distance(a, b, d)
    raise ValueError(f"unknown lifting kind {kind!r}")


# ---------------------------------------------------------------------------
# monad structure


def lift_map(kind: str, f, v):
    """Functor action: direct image, pushforward, or fuzzy direct image."""
    g = f.__getitem__ if isinstance(f, Mapping) else f
    if kind == SET:
        return frozenset(g(x) for x in v)
    if kind == DIST:
        return FinDist([(g(x), p) for x, p in v.items()])
    if kind == FUZZY:
        return FuzzySet([(g(x), m) for x, m in v.items()])
    raise ValueError(f"unknown lifting kind {kind!r}")


def lift_unit(kind: str, x):
    if kind == SET:
        return frozenset([x])
    if kind == DIST:
        return FinDist({x: 1})
    if kind == FUZZY:
        return FuzzySet({x: 1})
    raise ValueError(f"unknown lifting kind {kind!r}")


def lift_flatten(kind: str, vv):
    """Monad multiplication: union, weighted mixture, fuzzy big union."""
    if kind == SET:
        return frozenset().union(*vv)
    if kind == DIST:
        return FinDist([(x, p * q) for inner, p in vv.items() for x, q in inner.items()])
    if kind == FUZZY:
        return FuzzySet([(x, min(m, n)) for inner, m in vv.items() for x, n in inner.items()])
    raise ValueError(f"unknown lifting kind {kind!r}")
