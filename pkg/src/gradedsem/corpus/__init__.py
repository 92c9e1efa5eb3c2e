"""Example systems and proofs shipped with the package."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..metric import discrete_space, validate_metric
from ..liftings import FinDist
from ..systems import PROB_TS, Coalgebra, load_system


def corpus_dir() -> Path:
    return Path(str(resources.files(__name__)))


def system_path(name: str) -> Path:
    return corpus_dir() / f"{name}.json"


def proof_path(name: str) -> Path:
    return corpus_dir() / "proofs" / f"{name}.json"


def system_names() -> list[str]:
    return sorted(p.stem for p in corpus_dir().glob("*.json"))


def proof_names() -> list[str]:
    return sorted(p.stem for p in (corpus_dir() / "proofs").glob("*.json"))


def load(name: str) -> Coalgebra:
    return load_system(system_path(name))


def fig1_system(v: float | None = None) -> Coalgebra:
    """``x`` and ``y`` both split evenly between an ``a``-loop and a ``b``-loop.

    ``x`` reaches the ``a``-loop by ``a`` and the ``b``-loop by ``b``; ``y``
    crosses them over. ``v`` is ``d(a, b)``; ``None`` means discrete labels.
    """
    L = discrete_space(["a", "b"]) if v is None else validate_metric(["a", "b"], [[0, v], [v, 0]])
    half = 0.5
    trans = {
        "x": FinDist({("a", "p_a"): half, ("b", "p_b"): half}),
        "y": FinDist({("a", "p_b"): half, ("b", "p_a"): half}),
        "p_a": FinDist({("a", "p_a"): 1}),
        "p_b": FinDist({("b", "p_b"): 1}),
    }
    return Coalgebra(PROB_TS, L, ("x", "y", "p_a", "p_b"), trans)
