"""Evaluation of formulas on systems.

Label modalities, with ``s = 1 - d(a, b)`` the similarity of labels:

* metric trace:  ``max over (b, x') of  s  min  phi(x')``  (0 on deadlocks)
* fuzzy trace:   ``max over (b, x') of  R(x, b, x')  min  s  min  phi(x')``
* prob trace:    ``sum over (b, x') of  pi(b, x') * s * phi(x')``
* streams:       ``s  min  phi(x')`` for the unique successor ``(b, x')``

With discrete labels the prob-trace modality is the plain probability-weighted
sum over ``a``-transitions. The similarity factor keeps it nonexpansive when
labels are at metric distance.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np

from ..errors import SemanticsMismatch, WhitelistError
from ..graded import FUZZY_TRACE, METRIC_TRACE, PROB_TRACE, STREAM_BRANCHING, check_semantics
from ..systems import Coalgebra
from .formula import OP_SHAPES, WHITELISTS, Const1, Formula, Modal, Prop, check_whitelist, op_function

LINEAR = {PROB_TRACE}


def apply_modality(sem: str, L, a, step, phi) -> float:
    """``[[<a>]]`` applied to one one-step structure with successor values ``phi``."""
    dL = L.d if hasattr(L, "d") else L
    val = phi.__getitem__ if isinstance(phi, Mapping) else phi
    if sem == METRIC_TRACE:
        return max((min(1 - dL(a, b), val(y)) for b, y in step), default=0.0)
    if sem == FUZZY_TRACE:
        return max((min(m, 1 - dL(a, b), val(y)) for (b, y), m in step.items()), default=0.0)
    if sem == PROB_TRACE:
        return float(sum(p * (1 - dL(a, b)) * val(y) for (b, y), p in step.items()))
    if sem == STREAM_BRANCHING:
        b, y = step
        return min(1 - dL(a, b), val(y))
    raise SemanticsMismatch(f"unknown semantics {sem!r}")


@dataclass(frozen=True)
class ModalSignature:
    """Operator whitelist and modality table of one semantics."""

    semantics: str
    whitelist: frozenset

    @classmethod
    def of(cls, sem: str) -> "ModalSignature":
        if sem not in WHITELISTS:
            raise SemanticsMismatch(f"unknown semantics {sem!r}")
        return cls(sem, WHITELISTS[sem])

    def nonexpansive_on_grid(self, grid: float = 0.05, tol: float = 1e-9) -> dict:
        """Check every whitelisted op on a grid; ``op -> worst excess`` (<= tol means ok).

        Arguments and constants both range over multiples of ``grid``;
        ``aff`` uses only admissible ``(p, q)`` pairs.
        """
        pts = np.round(np.arange(0, 1 + grid / 2, grid), 12)
        out = {}
        for op in sorted(self.whitelist):
            arity, nparams = OP_SHAPES[op]
            if op == "aff":
                plist = [(p, q) for p in np.round(np.arange(-1, 1 + grid / 2, grid), 12) for q in pts
                         if 0 <= p + q <= 1 + 1e-12]
            else:
                plist = list(product(pts, repeat=nparams))
            worst = -np.inf
            args = np.array(list(product(pts, repeat=arity)))
            for params in plist:
                f = op_function(op, params)
                vals = f(*args.T)
                if np.any(vals < -tol) or np.any(vals > 1 + tol):
                    worst = max(worst, 1.0)
                    continue
                # sup-metric on [0,1]^k: |f(u) - f(v)| <= max_i |u_i - v_i|
                du = np.abs(args[:, None, :] - args[None, :, :]).max(-1)
                worst = max(worst, float(np.max(np.abs(vals[:, None] - vals[None, :]) - du)))
            out[op] = worst
        return out


class Model:
    """A system prepared for fast evaluation under one semantics.

    Each label gets an ``n x n`` matrix over states; modal steps become a
    matrix product (prob trace) or a max-min product (the other semantics).
    Value arrays may be 1-d (one formula) or 2-d (a batch, one row each).
    """

    def __init__(self, c: Coalgebra, sem: str):
        check_semantics(c, sem)
        self.c, self.sem = c, sem
        self.n = len(c.states)
        self.labels = tuple(c.labels.points)
        self.linear = sem in LINEAR
        dL = c.labels.d
        self.mats = {}
        for a in self.labels:
            M = np.zeros((self.n, self.n))
            for i, x in enumerate(c.states):
                for (b, y), w in c.successors(x):
                    j = c.index(y)
                    s = 1 - dL(a, b)
                    if self.linear:
                        M[i, j] += float(w) * s
                    else:
                        M[i, j] = max(M[i, j], min(float(w), s))
            self.mats[a] = M

    def modal(self, a, vals):
        if a not in self.mats:
            raise WhitelistError(f"label {a!r} is not declared")
        M = self.mats[a]
        if self.linear:
            return vals @ M.T
        if vals.ndim == 1:
            return np.minimum(M, vals[None, :]).max(axis=1)
        return np.minimum(M[None, :, :], vals[:, None, :]).max(axis=2)

    def ones(self):
        return np.ones(self.n)

    def evaluate(self, phi: Formula, memo: dict | None = None) -> np.ndarray:
        memo = {} if memo is None else memo
        got = memo.get(phi)
        if got is not None:
            return got
        if isinstance(phi, Const1):
            out = self.ones()
        elif isinstance(phi, Modal):
            out = self.modal(phi.label, self.evaluate(phi.sub, memo))
        elif isinstance(phi, Prop):
            out = op_function(phi.op, phi.params)(*(self.evaluate(s, memo) for s in phi.subs))
            out = np.clip(out, 0.0, 1.0)
        else:
            raise TypeError(f"not a formula: {phi!r}")
        memo[phi] = out
        return out


def evaluate(phi: Formula, c: Coalgebra, sem: str) -> dict:
    """``state -> truth value`` of ``phi`` under semantics ``sem``."""
    check_semantics(c, sem)
    check_whitelist(phi, sem)
    vals = Model(c, sem).evaluate(phi)
    return {x: float(v) for x, v in zip(c.states, vals)}
