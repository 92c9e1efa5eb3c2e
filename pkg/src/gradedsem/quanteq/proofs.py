"""JSON form of derivation trees.

Each node is ``{"rule", "conclusion": {"ctx", "lhs", "rhs", "eps"},
"premises", "axiom"?, "subst"?, "subst_depth"?}`` with terms in text syntax.
"""
from __future__ import annotations

import json
from pathlib import Path

from ..errors import ParseError, TermSyntaxError
from .terms import parse_term, term_text
from .theory import DerivationTree, Judgement


def proof_from_json(obj) -> DerivationTree:
    if not isinstance(obj, dict):
        raise ParseError("proof node must be an object")
    try:
        rule = obj["rule"]
        c = obj["conclusion"]
        ctx = [tuple(entry) for entry in c.get("ctx", [])]
        if any(len(e) != 3 for e in ctx):
            raise ParseError("context entries are [var, var, eps] triples")
        concl = Judgement(ctx, parse_term(c["lhs"]), parse_term(c["rhs"]), float(c["eps"]))
        premises = [proof_from_json(p) for p in obj.get("premises", [])]
        subst = {v: parse_term(t) for v, t in obj.get("subst", {}).items()}
    except KeyError as e:
        raise ParseError(f"missing key {e.args[0]!r} in proof node") from e
    except (TypeError, ValueError, TermSyntaxError) as e:
        raise ParseError(f"malformed proof node: {e}") from e
    return DerivationTree(rule, concl, tuple(premises), obj.get("axiom"), subst, obj.get("subst_depth"))


def proof_to_json(p: DerivationTree) -> dict:
    j = p.conclusion
    out = {
        "rule": p.rule,
        "conclusion": {"ctx": [list(e) for e in j.ctx], "lhs": term_text(j.lhs), "rhs": term_text(j.rhs),
                       "eps": j.eps},
        "premises": [proof_to_json(q) for q in p.premises],
    }
    if p.axiom is not None:
        out["axiom"] = p.axiom
    if p.subst:
        out["subst"] = {v: term_text(t) for v, t in p.subst}
    if p.subst_depth is not None:
        out["subst_depth"] = p.subst_depth
    return out


def load_proof(path) -> DerivationTree:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    return proof_from_json(data)


def dump_proof(p: DerivationTree, path=None) -> str:
    text = json.dumps(proof_to_json(p), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
