"""Reproduction scenarios with expected values and pass/fail verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import fig1_system
from .graded import PROB_TRACE, behavioural_distance, binarize_distribution, kleisli_distance
from .liftings import DIST, FinDist, kantorovich_distance
from .logic.search import logical_distance
from .logic.semantics import apply_modality
from .metric import (
    MANHATTAN,
    SUP,
    check_initial_cone,
    check_normed_isometric,
    k_tensor,
    validate_metric,
)

EQ, LE, GE = "==", "<=", ">="


@dataclass(frozen=True)
class Expectation:
    name: str
    value: float
    tol: float
    relation: str = EQ

    def holds(self, got: float) -> bool:
        if self.relation == EQ:
            return abs(got - self.value) <= self.tol
        if self.relation == LE:
            return got <= self.value + self.tol
        return got >= self.value - self.tol


@dataclass
class ReproReport:
    scenario: str
    computed: list = field(default_factory=list)  # (name, value)
    expected: list = field(default_factory=list)  # Expectation

    def add(self, name, value, expected=None, tol=1e-9, relation=EQ):
        self.computed.append((name, float(value)))
        if expected is not None:
            self.expected.append(Expectation(name, float(expected), tol, relation))

    def value(self, name) -> float:
        return dict(self.computed)[name]

    def checks(self) -> list:
        got = dict(self.computed)
        return [(e, got[e.name], e.holds(got[e.name])) for e in self.expected]

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks())

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "computed": [{"name": n, "value": v} for n, v in self.computed],
            "expected": [{"name": e.name, "value": e.value, "tol": e.tol, "relation": e.relation,
                          "pass": ok} for e, _, ok in self.checks()],
            "pass": self.passed,
        }


def stream_scenario() -> ReproReport:
    """Two-state value space under a two-letter stream alphabet."""
    L = validate_metric(["a", "b"], [[0, 0.8], [0.8, 0]])
    A0 = validate_metric(["v", "w"], [[0, 0.5], [0.5, 0]])
    X = k_tensor(L, A0, SUP)
    f = {"v": 0.75, "w": 0.25}

    def image(label, g):
        return {p: apply_modality("stream_branching", L, label, p, g) for p in X.points}

    fa, fb = image("a", f), image("b", f)
    p, q = ("a", "v"), ("b", "w")
    r = ReproReport("stream")
    r.add("gap_a", abs(fa[p] - fa[q]), 0.55, 1e-12)
    r.add("gap_b", abs(fb[p] - fb[q]), 0.05, 1e-12)
    r.add("distance", X.d(p, q), 0.8, 1e-12)
    r.add("initial_cone", check_initial_cone([fa, fb], X), 0, 0)
    # modal images of a normed-isometric family on the value space
    base = [{u: 1 - A0.d(s, u) for u in A0.points} for s in A0.points]
    family = [image(c, g) for c in L.points for g in base]
    r.add("normed_isometric", check_normed_isometric(family, X), 1, 0)
    return r


def fig1_metric(v: float = 0.5, depth: int = 4, grid: float = 0.05) -> ReproReport:
    c = fig1_system(v)
    r = ReproReport(f"fig1_metric({v:g})")
    bd = behavioural_distance(c, PROB_TRACE, "x", "y", 2)
    r.add("behavioural_depth2", bd.per_depth[2], v, 1e-6)
    ld = logical_distance(c, PROB_TRACE, "x", "y", depth)
    r.computed.append(("logical_formula_size", float(ld.formula.size)))
    r.add(f"logical_depth{depth}", ld.value, v * v, 1e-6, LE)
    cb = coupling_bound(v, grid)
    r.add("coupling_bound", cb.value("max_binarized"), v * v, 1e-6, LE)
    return r


def fig1_discrete(depth: int = 3) -> ReproReport:
    c = fig1_system(None)
    r = ReproReport("fig1_discrete")
    bd = behavioural_distance(c, PROB_TRACE, "x", "y", 2)
    r.add("behavioural_depth2", bd.per_depth[2], 1.0, 1e-9)
    ld = logical_distance(c, PROB_TRACE, "x", "y", depth)
    r.add(f"logical_depth{depth}", ld.value, 0.5, 1e-9)
    return r


def kantorovich_sup() -> ReproReport:
    L = validate_metric(["a", "b"], [[0, 0.5], [0.5, 0]])
    X = validate_metric(["x", "y"], [[0, 1], [1, 0]])
    s = FinDist({"x": 0.5, "y": 0.5})
    t = FinDist({"x": 1.0})
    r = ReproReport("kantorovich_sup")
    r.add("d(s,t)", kantorovich_distance(s, t, X)[0], 0.5, 1e-9)
    before, after = kleisli_distance(DIST, SUP, L, X, "a", s, "b", t)
    r.add("sup_before", before, 0.5, 1e-9)
    r.add("sup_after", after, 0.75, 1e-9)
    before_m, after_m = kleisli_distance(DIST, MANHATTAN, L, X, "a", s, "b", t)
    r.add("manhattan_before", before_m)
    r.add("manhattan_excess", after_m - before_m, 0.0, 1e-9, LE)
    return r


def grid_points(grid: float) -> list[float]:
    k = int(round(1 / grid))
    return [round(i * grid, 12) for i in range(k + 1)]


def coupling_bound(v: float = 0.5, grid: float = 0.05) -> ReproReport:
    """Worst binarized transport distance over admissible depth-1 value pairs."""
    L = validate_metric(["a", "b"], [[0, v], [v, 0]])

    def d(p, q):
        (a, s), (b, t) = p, q
        return float(MANHATTAN.k(L.d(a, b), abs(s - t)))

    best, arg = 0.0, (0.0, 0.0)
    pts = grid_points(grid)
    for va in pts:
        for vb in pts:
            if abs(va - vb) > v + 1e-12:
                continue
            mu = FinDist([(("a", va), 0.5), (("b", vb), 0.5)])
            nu = FinDist([(("a", vb), 0.5), (("b", va), 0.5)])
            val = kantorovich_distance(binarize_distribution(mu), binarize_distribution(nu), d)[0]
            if val > best + 1e-15:
                best, arg = val, (va, vb)
    r = ReproReport(f"coupling_bound({v:g})")
    r.add("max_binarized", best, v * v, 1e-6, LE)
    r.computed.append(("argmax_va", arg[0]))
    r.computed.append(("argmax_vb", arg[1]))
    return r


SCENARIOS = {
    "stream": stream_scenario,
    "fig1_metric": fig1_metric,
    "fig1_discrete": fig1_discrete,
    "kantorovich_sup": kantorovich_sup,
    "coupling_bound": coupling_bound,
}


def run_scenario(spec: str) -> ReproReport:
    """Run ``name`` or ``name(arg, ...)``, e.g. ``fig1_metric(0.2)``."""
    spec = spec.strip()
    name, args = spec, []
    if "(" in spec:
        if not spec.endswith(")"):
            raise ValueError(f"malformed scenario {spec!r}")
        name, rest = spec[:-1].split("(", 1)
        args = [float(a) for a in rest.split(",") if a.strip()]
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    return SCENARIOS[name](*args)


def default_scenarios() -> list[str]:
    return ["stream", "kantorovich_sup", "fig1_discrete", "fig1_metric(0.2)", "fig1_metric(0.5)",
            "fig1_metric(0.8)", "coupling_bound(0.5)"]
