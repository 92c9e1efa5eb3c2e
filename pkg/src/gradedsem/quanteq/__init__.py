"""Graded quantitative equational logic for trace theories."""
from .model import collapse, free_model_distance, free_model_interpret, layered_interpret, pair_distance
from .proofs import dump_proof, load_proof, proof_from_json, proof_to_json
from .terms import (
    GradedSignature,
    Op,
    OpSpec,
    Var,
    common_depth,
    has_depth,
    parse_term,
    substitute,
    term_text,
    uniform_depth_term,
)
from .theory import (
    Axiom,
    DerivationTree,
    GradedTheory,
    Judgement,
    build_trace_theory,
    check_derivation,
)

__all__ = [
    "collapse", "free_model_distance", "free_model_interpret", "layered_interpret", "pair_distance",
    "dump_proof", "load_proof", "proof_from_json", "proof_to_json", "GradedSignature", "Op", "OpSpec",
    "Var", "common_depth", "has_depth", "parse_term", "substitute", "term_text", "uniform_depth_term",
    "Axiom", "DerivationTree", "GradedTheory", "Judgement", "build_trace_theory", "check_derivation",
]
