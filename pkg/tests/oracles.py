"""Independent reference computations and random instance generators for tests.

Nothing here reuses the package's algorithms: traces come from explicit
path enumeration, transport from brute-force vertex enumeration, and the
fuzzy Hausdorff meet ranges over the whole carrier.
"""
from __future__ import annotations

from itertools import combinations, product

import numpy as np

from gradedsem.liftings import FinDist, FuzzySet
from gradedsem.metric import FinMetric, discrete_space, validate_metric
from gradedsem.systems import FUZZY_LTS, METRIC_TS, PROB_TS, STREAM, Coalgebra


# ---------------------------------------------------------------------------
# random instances


def random_metric(rng, names, scale=1.0, dim=2) -> FinMetric:
    pts = rng.random((len(names), dim))
    d = np.abs(pts[:, None, :] - pts[None, :, :]).max(-1) * scale
    return validate_metric(list(names), np.clip(d, 0, 1))


def random_labels(rng, k, discrete=False) -> FinMetric:
    names = ["a", "b", "c"][:k]
    if discrete or k == 1:
        return discrete_space(names)
    return random_metric(rng, names)


def random_system(rng, kind, n_states=None, n_labels=None, discrete=None) -> Coalgebra:
    n = n_states or int(rng.integers(2, 7))
    k = n_labels or int(rng.integers(1, 4))
    if discrete is None:
        discrete = kind == FUZZY_LTS or rng.random() < 0.3
    L = random_labels(rng, k, discrete)
    states = [f"s{i}" for i in range(n)]
    pairs = [(a, s) for a in L.points for s in states]
    trans = {}
    for x in states:
        if kind == STREAM:
            trans[x] = pairs[int(rng.integers(len(pairs)))]
            continue
        m = min(int(rng.integers(0 if kind in (METRIC_TS, FUZZY_LTS) else 1, 4)), len(pairs))
        chosen = [pairs[i] for i in rng.choice(len(pairs), size=m, replace=False)]
        if kind == METRIC_TS:
            trans[x] = frozenset(chosen)
        elif kind == FUZZY_LTS:
            trans[x] = FuzzySet({p: float(rng.integers(1, 11)) / 10 for p in chosen})
        else:
            w = rng.random(m) + 0.05
            w = w / w.sum()
            trans[x] = FinDist(dict(zip(chosen, map(float, w))))
    return Coalgebra(kind, L, states, trans)


# ---------------------------------------------------------------------------
# traces by explicit path enumeration


def paths(c: Coalgebra, x, n):
    """All length-``n`` paths from ``x`` as (word, weight list)."""
    if n == 0:
        yield (), []
        return
    for (a, y), w in c.successors(x):
        for word, ws in paths(c, y, n - 1):
            yield (a,) + word, [w] + ws


def brute_traces(c: Coalgebra, sem, x, n):
    if sem == "metric_trace":
        return {w for w, _ in paths(c, x, n)}
    if sem == "fuzzy_trace":
        out = {}
        for w, ws in paths(c, x, n):
            out[w] = max(out.get(w, 0.0), min(ws, default=1.0))
        return out
    if sem == "prob_trace":
        out = {}
        for w, ws in paths(c, x, n):
            out[w] = out.get(w, 0.0) + float(np.prod(ws))
        return out
    (w, _), = list(paths(c, x, n))
    return w


def fold_word_distance(dL, variant, w, v):
    """Head-first fold of a tensor with discount 1."""
    if not w:
        return 0.0
    head = dL(w[0], v[0])
    rest = fold_word_distance(dL, variant, w[1:], v[1:])
    if variant == "sup":
        return max(head, rest)
    if variant == "manhattan":
        return min(head + rest, 1.0)
    return min((head ** 2 + rest ** 2) ** 0.5, 1.0)


# ---------------------------------------------------------------------------
# liftings


def brute_hausdorff(A, B, d):
    A, B = list(A), list(B)
    left = max([min([d(a, b) for b in B] or [1.0]) for a in A] or [0.0])
    right = max([min([d(a, b) for a in A] or [1.0]) for b in B] or [0.0])
    return max(left, right)


def brute_fuzzy_hausdorff(A: dict, B: dict, X: FinMetric):
    def d0(P, Q):
        best = 0.0
        for x in X.points:
            px = P.get(x, 0.0)
            inner = min(max(max(px - Q.get(y, 0.0), 0.0), min(px, X.d(x, y))) for y in X.points)
            best = max(best, inner)
        return best

    return max(d0(A, B), d0(B, A))


def brute_kantorovich(mu: dict, nu: dict, d) -> float:
    """Minimum cost over all basic feasible couplings (vertex enumeration)."""
    xs, ys = list(mu), list(nu)
    m, n = len(xs), len(ys)
    A = np.zeros((m + n, m * n))
    for i in range(m):
        for j in range(n):
            A[i, i * n + j] = 1
            A[m + j, i * n + j] = 1
    b = np.array([mu[x] for x in xs] + [nu[y] for y in ys], dtype=float)
    cost = np.array([d(x, y) for x in xs for y in ys])
    best = np.inf
    for cells in combinations(range(m * n), m + n - 1):
        sub = A[:, cells]
        g, *_ = np.linalg.lstsq(sub, b, rcond=None)
        if np.max(np.abs(sub @ g - b)) > 1e-9 or np.min(g) < -1e-12:
            continue
        best = min(best, float(cost[list(cells)] @ g))
    return best


def random_dist(rng, support, k=None) -> FinDist:
    k = k or int(rng.integers(1, len(support) + 1))
    pts = [support[i] for i in rng.choice(len(support), size=k, replace=False)]
    w = rng.random(k) + 0.05
    w = w / w.sum()
    return FinDist(dict(zip(pts, map(float, w))))


def random_fuzzy(rng, support, allow_empty=True) -> FuzzySet:
    k = int(rng.integers(0 if allow_empty else 1, len(support) + 1))
    pts = [support[i] for i in rng.choice(len(support), size=k, replace=False)]
    return FuzzySet({p: float(rng.integers(1, 21)) / 20 for p in pts})


def random_set(rng, support) -> frozenset:
    k = int(rng.integers(0, len(support) + 1))
    return frozenset(support[i] for i in rng.choice(len(support), size=k, replace=False))


def all_words(labels, n):
    return list(product(labels, repeat=n))
