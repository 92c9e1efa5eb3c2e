"""Finite transition systems over a label space, plus JSON ingestion.

Four kinds are supported. Each maps a state to a one-step structure over
``(label, state)`` pairs:

=========  ===========================================
metric_ts  ``frozenset`` of pairs (may be empty)
fuzzy_lts  :class:`FuzzySet` of pairs (may be empty)
prob_ts    :class:`FinDist` of pairs
stream     a single pair
=========  ===========================================
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MetricError, ParseError, ValidationError
from .liftings import DIST, FUZZY, SET, FinDist, FuzzySet
from .metric import TOL, FinMetric, discrete_space, validate_metric

METRIC_TS, FUZZY_LTS, PROB_TS, STREAM = "metric_ts", "fuzzy_lts", "prob_ts", "stream"
SYSTEM_KINDS = (METRIC_TS, FUZZY_LTS, PROB_TS, STREAM)

LIFTING_OF = {METRIC_TS: SET, FUZZY_LTS: FUZZY, PROB_TS: DIST, STREAM: None}


@dataclass(frozen=True)
class Finding:
    location: str
    message: str

    def __str__(self):
        return f"{self.location}: {self.message}"


@dataclass(frozen=True)
class Coalgebra:
    kind: str
    labels: FinMetric
    states: tuple
    trans: dict
    state_metric: FinMetric | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "trans", dict(self.trans))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    def index(self, x) -> int:
        return self._index[x]

    def successors(self, x):
        """Yield ``((label, state), weight)``; weight is 1 for sets and streams."""
        step = self.trans.get(x)
        if step is None:
            return
        if self.kind == STREAM:
            yield step, 1
        elif self.kind == METRIC_TS:
            for pair in step:
                yield pair, 1
        else:
            yield from step.items()

    def __hash__(self):
        return hash((self.kind, self.labels, self.states))


def validate_system(c: Coalgebra) -> list[Finding]:
    """All invariant violations of ``c``; an empty list means the system is valid."""
    out: list[Finding] = []
    if c.kind not in SYSTEM_KINDS:
        return [Finding("kind", f"unknown system kind {c.kind!r}")]
    if len(set(c.states)) != len(c.states):
        out.append(Finding("states", "duplicate state ids"))
    if not c.states:
        out.append(Finding("states", "no states declared"))
    if c.kind == FUZZY_LTS and not c.labels.is_discrete and len(c.labels) > 1:
        out.append(Finding("labels", "fuzzy_lts requires a discrete label space"))
    if c.state_metric is not None and tuple(c.state_metric.points) != c.states:
        out.append(Finding("state_metric", "points do not match declared states"))
    for x in c.trans:
        if x not in c._index:
            out.append(Finding(f"trans.{x}", "transitions from undeclared state"))
    for x in c.states:
        loc = f"trans.{x}"
        step = c.trans.get(x)
        if step is None or (c.kind in (METRIC_TS, FUZZY_LTS) and len(step) == 0):
            if c.kind == PROB_TS:
                out.append(Finding(loc, "no outgoing distribution"))
            elif c.kind == STREAM:
                out.append(Finding(loc, "no successor"))
            continue
        expected = {METRIC_TS: frozenset, FUZZY_LTS: FuzzySet, PROB_TS: FinDist, STREAM: tuple}[c.kind]
        if not isinstance(step, expected):
            out.append(Finding(loc, f"expected {expected.__name__}, got {type(step).__name__}"))
            continue
        pairs = [step] if c.kind == STREAM else list(step)
        for pair in pairs:
            if not (isinstance(pair, tuple) and len(pair) == 2):
                out.append(Finding(loc, f"entry {pair!r} is not a (label, state) pair"))
                continue
            a, y = pair
            if a not in c.labels:
                out.append(Finding(loc, f"undeclared label {a!r}"))
            if y not in c._index:
                out.append(Finding(loc, f"undeclared target state {y!r}"))
    return out


def check_system(c: Coalgebra) -> Coalgebra:
    findings = validate_system(c)
    if findings:
        raise ValidationError(findings)
    return c


# ---------------------------------------------------------------------------
# JSON


def _require(cond, msg):
    if not cond:
        raise ParseError(msg)


def _label_space(spec) -> FinMetric:
    _require(isinstance(spec, dict), "'labels' must be an object")
    names = spec.get("names")
    _require(isinstance(names, list) and all(isinstance(n, str) for n in names),
             "'labels.names' must be a list of strings")
    metric = spec.get("metric", "discrete")
    if metric == "discrete":
        return discrete_space(names)
    _require(isinstance(metric, list) and all(isinstance(r, list) for r in metric),
             "'labels.metric' must be \"discrete\" or a matrix")
    try:
        return validate_metric(names, metric)
    except MetricError as e:
        raise ValidationError([Finding("labels.metric", str(e))]) from e


def from_dict(data) -> Coalgebra:
    """Build and validate a system from its JSON object form."""
    _require(isinstance(data, dict), "top level must be an object")
    for key in ("kind", "labels", "states", "trans"):
        _require(key in data, f"missing key {key!r}")
    kind = data["kind"]
    _require(kind in SYSTEM_KINDS, f"unknown kind {kind!r}")
    labels = _label_space(data["labels"])
    states = data["states"]
    _require(isinstance(states, list) and all(isinstance(s, str) for s in states),
             "'states' must be a list of strings")
    trans_raw = data["trans"]
    _require(isinstance(trans_raw, dict), "'trans' must be an object")
    weighted = kind in (FUZZY_LTS, PROB_TS)
    findings: list[Finding] = []
    trans = {}
    for x, entries in trans_raw.items():
        loc = f"trans.{x}"
        _require(isinstance(entries, list), f"{loc} must be a list")
        pairs = []
        for k, e in enumerate(entries):
            _require(isinstance(e, dict) and "label" in e and "to" in e,
                     f"{loc}[{k}] needs 'label' and 'to'")
            if weighted:
                _require("w" in e and isinstance(e["w"], (int, float)) and not isinstance(e["w"], bool),
                         f"{loc}[{k}] needs a numeric 'w'")
            else:
                _require("w" not in e, f"{loc}[{k}]: 'w' is not allowed for {kind}")
            pairs.append(((e["label"], e["to"]), e.get("w", 1)))
        if kind == STREAM:
            _require(len(pairs) == 1, f"{loc}: stream states need exactly one successor")
            trans[x] = pairs[0][0]
        elif kind == METRIC_TS:
            trans[x] = frozenset(p for p, _ in pairs)
        elif kind == FUZZY_LTS:
            bad = [w for _, w in pairs if not (0 < w <= 1)]
            if bad:
                findings.append(Finding(loc, f"membership {bad[0]} outside (0, 1]"))
                continue
            trans[x] = FuzzySet(pairs)
        else:
            if not pairs:
                continue
            bad = [w for _, w in pairs if not (0 < w <= 1)]
            if bad:
                findings.append(Finding(loc, f"probability {bad[0]} outside (0, 1]"))
                continue
            mass = sum(w for _, w in pairs)
            if abs(mass - 1) > TOL:
                findings.append(Finding(loc, f"mass {mass:.6g} ≠ 1"))
                continue
            trans[x] = FinDist(pairs)
    state_metric = None
    if "state_metric" in data:
        try:
            state_metric = validate_metric(states, data["state_metric"])
        except MetricError as e:
            findings.append(Finding("state_metric", str(e)))
    c = Coalgebra(kind, labels, states, trans, state_metric)
    findings.extend(validate_system(c))
    if findings:
        raise ValidationError(findings)
    return c


def to_dict(c: Coalgebra) -> dict:
    """Canonical JSON object: entries sorted by label then target order."""
    lab = {a: i for i, a in enumerate(c.labels.points)}
    metric = "discrete" if c.labels.is_discrete else c.labels.dist.tolist()

    def key(item):
        (a, y), _ = item
        return lab.get(a, len(lab)), c._index.get(y, len(c._index))

    trans = {}
    for x in c.states:
        if x not in c.trans:
            continue
        entries = sorted(c.successors(x), key=key)
        if c.kind in (FUZZY_LTS, PROB_TS):
            trans[x] = [{"label": a, "to": y, "w": float(w)} for (a, y), w in entries]
        else:
            trans[x] = [{"label": a, "to": y} for (a, y), _ in entries]
    out = {
        "kind": c.kind,
        "labels": {"names": list(c.labels.points), "metric": metric},
        "states": list(c.states),
        "trans": trans,
    }
    if c.state_metric is not None:
        out["state_metric"] = c.state_metric.dist.tolist()
    return out


def loads_system(text: str) -> Coalgebra:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    return from_dict(data)


def load_system(path) -> Coalgebra:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    return loads_system(text)


def dumps_system(c: Coalgebra) -> str:
    return json.dumps(to_dict(c), indent=2, ensure_ascii=False)


def save_system(c: Coalgebra, path) -> None:
    Path(path).write_text(dumps_system(c) + "\n", encoding="utf-8")
