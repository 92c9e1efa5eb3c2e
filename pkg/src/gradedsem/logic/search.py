"""Formula enumeration, bounded logical distance, witnesses and invariance reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..errors import NotFound
from ..graded import all_pairs_distance, check_semantics
from ..systems import Coalgebra
from .formula import COMMUTATIVE, OP_SHAPES, TRUE, WHITELISTS, Formula, Modal, Prop, op_function
from .semantics import Model

WITNESS_TOL = 1e-6


@dataclass(frozen=True)
class PropConfig:
    """Which propositional operators to use and how far to expand them.

    ``extra_size`` bounds formula size at depth ``d`` by ``d + 1 + extra_size``
    (modal-only formulas have size ``d + 1``). ``max_per_layer`` caps the
    number of semantically distinct formulas kept per depth.
    """

    ops: frozenset = frozenset()
    grid: float = 0.05
    extra_size: int = 2
    max_per_layer: int = 64

    @classmethod
    def full(cls, sem: str, **kw) -> "PropConfig":
        return cls(ops=WHITELISTS[sem], **kw)

    def constants(self, op: str) -> list[tuple]:
        """Non-trivial constant tuples for ``op`` drawn from the grid."""
        k = int(round(1 / self.grid))
        g = [round(i * self.grid, 10) for i in range(k + 1)]
        if op in ("addc", "subc"):
            return [(c,) for c in g if c > 0]
        if op == "meetc":
            return [(c,) for c in g if c < 1]
        if op == "aff":
            ps = [round(i * self.grid, 10) for i in range(-k, k + 1)]
            return [(p, q) for p in ps for q in g
                    if -1e-12 <= p + q <= 1 + 1e-12 and (p, q) != (1.0, 0.0)]
        return [()]


MODAL_ONLY = PropConfig()


def _ops_for(sem: str, cfg: PropConfig | None) -> list[str]:
    if cfg is None:
        return []
    return sorted(set(cfg.ops) & WHITELISTS[sem])


# ---------------------------------------------------------------------------
# syntactic enumeration


def enumerate_formulas(sem: str, labels: Sequence, depth: int, size_cap: int | None = None,
                       prop_config: PropConfig | None = None) -> Iterator[Formula]:
    """All whitelisted formulas of depth ``<= depth`` and size ``<= size_cap``.

    Ordered by depth, then size, then text. Arguments of commutative binary
    operators are kept in canonical order. Without propositional operators
    the default cap admits every modal word.
    """
    ops = _ops_for(sem, prop_config)
    cfg = prop_config or MODAL_ONLY
    labels = sorted(labels)
    if size_cap is None:
        size_cap = depth + 1 + (cfg.extra_size if ops else 0)
    table: dict = {}

    def cell(d, s):
        if (d, s) in table:
            return table[(d, s)]
        out = []
        if s >= 1 and d >= 0:
            if d == 0 and s == 1:
                out.append(TRUE)
            if d >= 1:
                out.extend(Modal(a, f) for a in labels for f in cell(d - 1, s - 1))
            for op in ops:
                arity, _ = OP_SHAPES[op]
                if arity == 1:
                    out.extend(Prop(op, ps, (f,)) for f in cell(d, s - 1) for ps in cfg.constants(op))
                else:
                    for s1 in range(1, s - 1):
                        for f1 in cell(d, s1):
                            for f2 in cell(d, s - 1 - s1):
                                if op in COMMUTATIVE and f2.key() < f1.key():
                                    continue
                                out.append(Prop(op, (), (f1, f2)))
            out.sort(key=lambda f: f.text())
        table[(d, s)] = out
        return out

    for d in range(depth + 1):
        for s in range(1, size_cap + 1):
            yield from cell(d, s)


# ---------------------------------------------------------------------------
# semantic layers


def _vkey(v: np.ndarray) -> bytes:
    return (np.round(v, 12) + 0.0).tobytes()


@dataclass
class Layer:
    depth: int
    vecs: list = field(default_factory=list)
    formulas: list = field(default_factory=list)
    keys: set = field(default_factory=set)

    def add(self, v, phi, cap) -> bool:
        """Keep ``v`` unless seen or full; ``phi`` may be a thunk building the formula."""
        if len(self.vecs) >= cap:
            return False
        k = _vkey(v)
        if k in self.keys:
            return False
        self.keys.add(k)
        self.vecs.append(v)
        self.formulas.append(phi() if callable(phi) else phi)
        return True

    def matrix(self):
        return np.array(self.vecs).reshape(len(self.vecs), -1)


def formula_layers(model: Model, depth: int, prop_config: PropConfig | None = None) -> list[Layer]:
    """Semantically distinct formulas per uniform depth ``0..depth``.

    Each layer starts from the modal images of the previous one and is then
    closed under the enabled operators, smallest formulas first. Within a
    layer one representative is kept per value vector (the first one
    generated, which is the smallest in enumeration order for modal words).
    """
    ops = _ops_for(model.sem, prop_config)
    cfg = prop_config or MODAL_ONLY
    cap = cfg.max_per_layer if ops else 10**9
    layers: list[Layer] = []
    for d in range(depth + 1):
        layer = Layer(d)
        if d == 0:
            layer.add(model.ones(), TRUE, cap)
        else:
            prev = layers[-1]
            P = prev.matrix()
            order = sorted(range(len(prev.formulas)), key=lambda i: prev.formulas[i].key())
            for a in sorted(model.labels):
                img = model.modal(a, P)
                for i in order:
                    layer.add(img[i], Modal(a, prev.formulas[i]), cap)
        if ops:
            _close(layer, ops, cfg, d + 1 + cfg.extra_size, cap)
        layers.append(layer)
    return layers


def _close(layer: Layer, ops, cfg: PropConfig, max_size: int, cap: int) -> None:
    by_size: dict[int, list[int]] = {}
    for i, f in enumerate(layer.formulas):
        by_size.setdefault(f.size, []).append(i)
    lo = min(by_size) if by_size else 1
    for s in range(lo + 1, max_size + 1):
        new = []
        for op in ops:
            arity, _ = OP_SHAPES[op]
            if arity == 1:
                idx = by_size.get(s - 1, [])
                if not idx:
                    continue
                V = np.array([layer.vecs[i] for i in idx])
                for ps in cfg.constants(op):
                    out = np.clip(op_function(op, ps)(V), 0.0, 1.0)
                    for r, i in enumerate(idx):
                        if layer.add(out[r], lambda: Prop(op, ps, (layer.formulas[i],)), cap):
                            new.append(len(layer.vecs) - 1)
                    if len(layer.vecs) >= cap:
                        break
            else:
                f = op_function(op, ())
                for s1 in range(1, s - 1):
                    s2 = s - 1 - s1
                    if op in COMMUTATIVE and s2 < s1:
                        continue
                    for i in by_size.get(s1, []):
                        for j in by_size.get(s2, []):
                            if op in COMMUTATIVE and s1 == s2 and j <= i:
                                continue
                            v = f(layer.vecs[i], layer.vecs[j])
                            if layer.add(v, lambda: _binary(op, layer.formulas[i], layer.formulas[j]), cap):
                                new.append(len(layer.vecs) - 1)
            if len(layer.vecs) >= cap:
                break
        by_size.setdefault(s, []).extend(new)
        if len(layer.vecs) >= cap:
            break


def _binary(op, fi, fj):
    if op in COMMUTATIVE and fj.key() < fi.key():
        fi, fj = fj, fi
    return Prop(op, (), (fi, fj))


# ---------------------------------------------------------------------------
# logical distance


@dataclass(frozen=True)
class LogicalDistance:
    value: float
    formula: Formula
    per_depth: tuple = ()


def logical_distance(c: Coalgebra, sem: str, x, y, depth: int, prop_config: PropConfig | None = None,
                     exact_depth: bool = False) -> LogicalDistance:
    """Largest gap ``|[[phi]](x) - [[phi]](y)|`` over formulas of depth ``<= depth``.

    With ``exact_depth`` only formulas of depth exactly ``depth`` count.
    The result is a lower bound for the supremum over all formulas.
    """
    check_semantics(c, sem)
    model = Model(c, sem)
    layers = formula_layers(model, depth, prop_config)
    i, j = c.index(x), c.index(y)
    best, best_phi, per = -1.0, TRUE, []
    for layer in layers:
        M = layer.matrix()
        gaps = np.abs(M[:, i] - M[:, j])
        k = int(np.argmax(gaps))
        per.append(float(gaps[k]))
        if exact_depth and layer.depth != depth:
            continue
        if gaps[k] > best:
            best, best_phi = float(gaps[k]), layer.formulas[k]
    return LogicalDistance(max(best, 0.0), best_phi, tuple(per))


def pairwise_logical_distance(model: Model, layers: list[Layer]) -> tuple[np.ndarray, np.ndarray]:
    """``(G, A)``: ``G[i, j]`` max gap over all layers, ``A[i, j]`` flat index of a best formula."""
    M = np.concatenate([layer.matrix() for layer in layers], axis=0)
    gaps = np.abs(M[:, :, None] - M[:, None, :])
    return gaps.max(axis=0), gaps.argmax(axis=0)


# ---------------------------------------------------------------------------
# witnesses


def witness_search(c: Coalgebra, sem: str, x, y, depth: int, target: float,
                   prop_config: PropConfig | None = None, tol: float = WITNESS_TOL) -> Formula:
    """First formula with gap ``>= target - tol``.

    Modal words over the declared labels are tried first in enumeration
    order; then, if operators are enabled, the propositional layers.
    Raises :class:`NotFound` carrying the best gap seen.
    """
    check_semantics(c, sem)
    model = Model(c, sem)
    i, j = c.index(x), c.index(y)
    memo: dict = {}
    best, best_phi = -1.0, TRUE
    for phi in enumerate_formulas(sem, model.labels, depth):
        v = model.evaluate(phi, memo)
        gap = abs(float(v[i]) - float(v[j]))
        if gap >= target - tol:
            return phi
        if gap > best:
            best, best_phi = gap, phi
    if _ops_for(sem, prop_config):
        for layer in formula_layers(model, depth, prop_config):
            for v, phi in zip(layer.vecs, layer.formulas):
                gap = abs(float(v[i]) - float(v[j]))
                if gap >= target - tol:
                    return phi
                if gap > best:
                    best, best_phi = gap, phi
    raise NotFound(max(best, 0.0), best_phi)


# ---------------------------------------------------------------------------
# invariance


@dataclass(frozen=True)
class PairReport:
    x: object
    y: object
    logical: float
    formula: Formula
    behavioural: float
    status: str  # "equal", "strict" or "violation"


@dataclass(frozen=True)
class InvarianceReport:
    semantics: str
    depth: int
    pairs: tuple

    @property
    def violations(self) -> list:
        return [p for p in self.pairs if p.status == "violation"]

    @property
    def ok(self) -> bool:
        return not self.violations


def invariance_check(c: Coalgebra, sem: str, depth: int, prop_config: PropConfig | None = None,
                     tol: float = 1e-9) -> InvarianceReport:
    """Compare logical and behavioural distance for every pair of distinct states.

    A pair is a violation when the logical distance exceeds the behavioural
    running maximum by more than ``tol``, and strict when it falls short by
    more than 1e-6.
    """
    check_semantics(c, sem)
    model = Model(c, sem)
    layers = formula_layers(model, depth, prop_config)
    G, A = pairwise_logical_distance(model, layers)
    flat = [f for layer in layers for f in layer.formulas]
    beh = all_pairs_distance(c, sem, depth)
    out = []
    for (x, y), bd in beh.items():
        i, j = c.index(x), c.index(y)
        lg = float(G[i, j])
        if lg > bd.max + tol:
            status = "violation"
        elif lg < bd.max - WITNESS_TOL:
            status = "strict"
        else:
            status = "equal"
        out.append(PairReport(x, y, lg, flat[int(A[i, j])], bd.max, status))
    return InvarianceReport(sem, depth, tuple(out))
