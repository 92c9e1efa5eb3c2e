"""Finite pseudometric spaces, unit-interval arithmetic and trace tensors.

Distances live in [0, 1]. Comparisons use the absolute tolerance ``TOL``.
Point ids are arbitrary hashables; labels are usually strings, trace words
are tuples of labels and tensor products use pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetryError,
    NonexpansiveInputError,
    RangeError,
    ReflexivityError,
    SeparationError,
    SizeError,
    TriangleError,
)

TOL = 1e-9
DEFAULT_SIZE_CAP = 10**6

METRIC = "metric"
PSEUDOMETRIC = "pseudometric"


def oplus(x, y):
    """Truncated addition on [0, 1]."""
    return min(x + y, 1)


def ominus(x, y):
    """Truncated subtraction on [0, 1]."""
    return max(x - y, 0)


def clamp01(x):
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class FinMetric:
    """A finite (pseudo)metric space with an explicit distance matrix.

    Build instances through :func:`validate_metric` unless the matrix is
    known to satisfy the axioms (e.g. it came out of :func:`k_tensor`).
    """

    points: tuple
    dist: np.ndarray
    kind: str = PSEUDOMETRIC
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})
        if len(self._index) != len(self.points):
            raise ValueError("duplicate point ids")
        if d.shape != (len(self.points), len(self.points)):
            raise ValueError(f"distance matrix has shape {d.shape}, expected square of size {len(self.points)}")

    def __len__(self):
        return len(self.points)

    def __contains__(self, p):
        return p in self._index

    def __iter__(self):
        return iter(self.points)

    def index(self, p) -> int:
        return self._index[p]

    def d(self, p, q) -> float:
        return float(self.dist[self._index[p], self._index[q]])

    __call__ = d

    @property
    def is_discrete(self) -> bool:
        n = len(self.points)
        off = ~np.eye(n, dtype=bool)
        return bool(np.all(np.abs(self.dist[off] - 1.0) <= TOL))

    def restrict(self, pts: Iterable) -> "FinMetric":
        pts = list(pts)
        idx = [self._index[p] for p in pts]
        return FinMetric(pts, self.dist[np.ix_(idx, idx)], self.kind)

    def __eq__(self, other):
        if not isinstance(other, FinMetric):
            return NotImplemented
        return self.points == other.points and np.array_equal(self.dist, other.dist)

    def __hash__(self):
        return hash((self.points, self.dist.tobytes()))


# Labels are just a finite metric space; the alias documents intent.
LabelSpace = FinMetric


def validate_metric(points: Sequence, matrix, kind: str = PSEUDOMETRIC) -> FinMetric:
    """Check the (pseudo)metric axioms and return a :class:`FinMetric`.

    Raises the exception for the first violated axiom, checked in the order
    range, reflexivity, symmetry, separation, triangle.
    """
    if kind not in (METRIC, PSEUDOMETRIC):
        raise ValueError(f"unknown metric kind {kind!r}")
    pts = list(points)
    d = np.asarray(matrix, dtype=float)
    n = len(pts)
    if d.shape != (n, n):
        raise RangeError(f"matrix has shape {d.shape}, expected ({n}, {n})")
    if not np.all(np.isfinite(d)) or np.any(d < 0) or np.any(d > 1):
        i, j = np.argwhere(~np.isfinite(d) | (d < 0) | (d > 1))[0]
        raise RangeError(f"d({pts[i]}, {pts[j]}) = {d[i, j]} outside [0, 1]")
    for i in range(n):
        if abs(d[i, i]) > TOL:
            raise ReflexivityError(f"d({pts[i]}, {pts[i]}) = {d[i, i]} != 0")
    asym = np.abs(d - d.T)
    if np.any(asym > TOL):
        i, j = np.argwhere(asym > TOL)[0]
        raise AsymmetryError(f"d({pts[i]}, {pts[j]}) = {d[i, j]} but d({pts[j]}, {pts[i]}) = {d[j, i]}")
    if kind == METRIC:
        for i, j in combinations(range(n), 2):
            if d[i, j] <= TOL:
                raise SeparationError(f"d({pts[i]}, {pts[j]}) = 0 for distinct points")
    # d[i,k] <= d[i,j] + d[j,k] for all j, vectorised over (i, k)
    for j in range(n):
        excess = d - (d[:, j][:, None] + d[j, :][None, :])
        if np.any(excess > TOL):
            i, k = np.argwhere(excess > TOL)[0]
            raise TriangleError(
                f"d({pts[i]}, {pts[k]}) = {d[i, k]} > d({pts[i]}, {pts[j]}) + d({pts[j]}, {pts[k]}) = {d[i, j] + d[j, k]}"
            )
    return FinMetric(pts, d, kind)


def discrete_space(points: Iterable) -> FinMetric:
    pts = list(points)
    n = len(pts)
    return FinMetric(pts, 1.0 - np.eye(n), METRIC)


# ---------------------------------------------------------------------------
# tensors


@dataclass(frozen=True)
class TensorKind:
    variant: str = "sup"
    discount: float = 1.0

    def __post_init__(self):
        if self.variant not in ("sup", "manhattan", "euclidean"):
            raise ValueError(f"unknown tensor variant {self.variant!r}")
        if not (0 < self.discount <= 1):
            raise ValueError(f"discount must lie in (0, 1], got {self.discount}")

    def k(self, x, y):
        """Combine a head distance ``x`` with a tail distance ``y``."""
        y = self.discount * y
        if self.variant == "sup":
            return np.maximum(x, y)
        if self.variant == "manhattan":
            return np.minimum(x + y, 1.0)
        return np.minimum(np.sqrt(x * x + y * y), 1.0)


SUP = TensorKind("sup")
MANHATTAN = TensorKind("manhattan")
EUCLIDEAN = TensorKind("euclidean")


def k_tensor(A: FinMetric, B: FinMetric, t: TensorKind) -> FinMetric:
    """Product space ``A x B`` with distance ``k(d_A, discount * d_B)``."""
    dA, dB = A.dist, B.dist
    d = t.k(dA[:, None, :, None], dB[None, :, None, :])
    n = len(A) * len(B)
    points = [(a, b) for a in A.points for b in B.points]
    return FinMetric(points, np.clip(d.reshape(n, n), 0.0, 1.0), PSEUDOMETRIC)


def trace_space(L: FinMetric, n: int, t: TensorKind, cap: int = DEFAULT_SIZE_CAP) -> FinMetric:
    """Words of length ``n`` over ``L``; distance folds ``k`` head-first.

    ``d(a.w, b.v) = k(d_L(a, b), d(w, v))``, so the last letter is the most
    discounted one.
    """
    if n < 0:
        raise ValueError("trace length must be non-negative")
    if len(L) ** n > cap:
        raise SizeError(f"|L|^n = {len(L)}^{n} exceeds cap {cap}")
    words: list[tuple] = [()]
    d = np.zeros((1, 1))
    for _ in range(n):
        m = len(words)
        d = t.k(L.dist[:, None, :, None], d[None, :, None, :]).reshape(len(L) * m, len(L) * m)
        words = [(a,) + w for a in L.points for w in words]
    return FinMetric(words, np.clip(d, 0.0, 1.0), PSEUDOMETRIC)


def word_distance(L: FinMetric, t: TensorKind, w1: Sequence, w2: Sequence) -> float:
    """Distance of two equal-length words without enumerating ``L^n``."""
    if len(w1) != len(w2):
        raise ValueError("words of different length")
    acc = 0.0
    for a, b in zip(reversed(w1), reversed(w2)):
        acc = float(t.k(L.d(a, b), acc))
    return acc


# ---------------------------------------------------------------------------
# nonexpansiveness and cones


def _as_fn(f) -> Callable:
    return f.__getitem__ if isinstance(f, Mapping) else f


def check_nonexpansive(f, X: FinMetric, tol: float = TOL):
    """Return ``(ok, pair)``; ``pair`` is a worst violating pair or ``None``."""
    g = _as_fn(f)
    vals = np.array([g(p) for p in X.points], dtype=float)
    excess = np.abs(vals[:, None] - vals[None, :]) - X.dist
    i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
    if excess[i, j] > tol:
        return False, (X.points[i], X.points[j])
    return True, None


def check_initial_cone(fs: Sequence, X: FinMetric, tol: float = TOL) -> bool:
    """True iff the sup-pseudometric induced by ``fs`` reaches ``d`` on all pairs."""
    for f in fs:
        ok, pair = check_nonexpansive(f, X, tol)
        if not ok:
            raise NonexpansiveInputError(f"map is not nonexpansive at {pair}")
    induced = _induced(fs, X)
    return bool(np.all(induced >= X.dist - tol))


def _induced(fs, X):
    n = len(X)
    best = np.zeros((n, n))
    for f in fs:
        g = _as_fn(f)
        vals = np.array([g(p) for p in X.points], dtype=float)
        best = np.maximum(best, np.abs(vals[:, None] - vals[None, :]))
    return best


def check_normed_isometric(fs: Sequence, X: FinMetric, eps_grid: Iterable[float] | None = None,
                           tol: float = TOL) -> bool:
    """Normed-isometry test on a finite family.

    For every pair with ``d(x, y) > eps`` some ``f`` must have
    ``|f(x) - f(y)| > eps`` and ``f(x) v f(y) = 1``. Without an explicit
    grid, ``eps`` runs over realised distances minus 1e-6, which suffices
    because the condition only changes at realised distances.
    """
    n = len(X)
    vals = [np.array([_as_fn(f)(p) for p in X.points], dtype=float) for f in fs]
    if eps_grid is None:
        eps_grid = sorted({float(v) - 1e-6 for v in X.dist.ravel() if v > 1e-6})
    eps_grid = [e for e in eps_grid if e > 0]
    # best normed gap per pair: max over f with f(x) v f(y) = 1 of |f(x) - f(y)|
    best = np.full((n, n), -1.0)
    for v in vals:
        gap = np.abs(v[:, None] - v[None, :])
        top = np.maximum(v[:, None], v[None, :]) >= 1 - tol
        best = np.where(top, np.maximum(best, gap), best)
    for eps in eps_grid:
        need = X.dist > eps
        if np.any(need & (best <= eps)):
            return False
    return True


def distance_functions(X: FinMetric) -> list[dict]:
    """The family ``{d(p, .) : p in X}``; always initial on ``X``."""
    return [{q: X.d(p, q) for q in X.points} for p in X.points]
