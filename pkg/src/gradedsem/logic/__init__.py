"""Quantitative graded modal logic over the built-in semantics."""
from .formula import (
    TRUE,
    WHITELISTS,
    Const1,
    Formula,
    Modal,
    Prop,
    check_whitelist,
    formula_word,
    parse_formula,
    word_formula,
)
from .search import (
    InvarianceReport,
    LogicalDistance,
    PairReport,
    PropConfig,
    enumerate_formulas,
    formula_layers,
    invariance_check,
    logical_distance,
    witness_search,
)
from .semantics import Model, ModalSignature, apply_modality, evaluate

__all__ = [
    "TRUE", "WHITELISTS", "Const1", "Formula", "Modal", "Prop", "check_whitelist", "formula_word",
    "parse_formula", "word_formula", "InvarianceReport", "LogicalDistance", "PairReport", "PropConfig",
    "enumerate_formulas", "formula_layers", "invariance_check", "logical_distance", "witness_search",
    "Model", "ModalSignature", "apply_modality", "evaluate",
]
