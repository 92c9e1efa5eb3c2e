from itertools import islice

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradedsem import corpus
from gradedsem.corpus import fig1_system
from gradedsem.errors import DepthError, FormulaSyntaxError, NotFound, WhitelistError
from gradedsem.graded import (
    FUZZY_TRACE,
    METRIC_TRACE,
    PROB_TRACE,
    SEMANTICS,
    STREAM_BRANCHING,
    SYSTEM_OF,
    behavioural_distance,
    depth_distance,
)
from gradedsem.logic import (
    TRUE,
    WHITELISTS,
    Modal,
    Model,
    ModalSignature,
    Prop,
    PropConfig,
    enumerate_formulas,
    evaluate,
    formula_layers,
    invariance_check,
    logical_distance,
    parse_formula,
    witness_search,
    word_formula,
)
from gradedsem.logic.formula import formula_word, labels_used, op_function, ops_used
from gradedsem.logic.semantics import apply_modality
from gradedsem.metric import discrete_space, k_tensor, validate_metric, SUP
from oracles import all_words, brute_traces, random_system


def reference_eval(phi, c, sem, x):
    """Direct recursive evaluation from the modality definitions."""
    if phi is TRUE or phi == TRUE:
        return 1.0
    if isinstance(phi, Modal):
        s = lambda b: 1 - c.labels.d(phi.label, b)  # noqa: E731
        succ = list(c.successors(x))
        vals = [(s(b), w, reference_eval(phi.sub, c, sem, y)) for (b, y), w in succ]
        if sem == PROB_TRACE:
            return sum(w * sb * v for sb, w, v in vals)
        if sem == FUZZY_TRACE:
            return max((min(w, sb, v) for sb, w, v in vals), default=0.0)
        return max((min(sb, v) for sb, _, v in vals), default=0.0)
    args = [reference_eval(s, c, sem, x) for s in phi.subs]
    return float(np.clip(op_function(phi.op, phi.params)(*args), 0, 1))


class TestSyntax:
    def test_parse_modal_word(self):
        phi = parse_formula("<a><b>1")
        assert phi == Modal("a", Modal("b", TRUE)) and phi.depth == 2
        assert parse_formula("⟨a⟩⟨b⟩1") == phi
        assert str(phi) == "<a><b>1"

    def test_depth_error(self):
        with pytest.raises(DepthError):
            parse_formula("or(<a>1, 1)")

    def test_whitelist_error(self):
        with pytest.raises(WhitelistError):
            parse_formula("and(<a>1,<b>1)", PROB_TRACE)
        parse_formula("and(<a>1,<b>1)", STREAM_BRANCHING)

    @pytest.mark.parametrize("text", ["", "<a>", "or(1)", "<a>1 1", "meetc(1.5, 1)", "aff(1, 0.5, 1)",
                                      "foo(1)", "or(1, 1"])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(text)

    def test_constants_and_roundtrip(self):
        for text in ["meetc(0.3, <a>1)", "aff(-0.5, 0.75, <a><b>1)", "neg(<a>1)",
                     "or(<a>1, <b>1)", "subc(0.25, addc(0.1, 1))"]:
            phi = parse_formula(text)
            assert parse_formula(str(phi)) == phi

    def test_helpers(self):
        phi = parse_formula("or(<a><b>1, <c><a>1)")
        assert ops_used(phi) == {"or"} and labels_used(phi) == {"a", "b", "c"}
        assert formula_word(word_formula(("a", "b"))) == ("a", "b")
        assert formula_word(phi) is None


class TestEnumeration:
    def test_small_counts(self):
        assert list(enumerate_formulas(PROB_TRACE, ["a", "b"], 0)) == [TRUE]
        assert [str(f) for f in enumerate_formulas(PROB_TRACE, ["b", "a"], 1)] == ["1", "<a>1", "<b>1"]
        assert len(list(enumerate_formulas(PROB_TRACE, ["a", "b"], 2))) == 7

    def test_order_is_depth_size_text(self):
        fs = list(enumerate_formulas(FUZZY_TRACE, ["a", "b"], 2, prop_config=PropConfig.full(FUZZY_TRACE, grid=0.5)))
        keys = [f.key() for f in fs]
        assert keys == sorted(keys)
        assert len(set(fs)) == len(fs)

    def test_commutative_args_canonical(self):
        fs = list(enumerate_formulas(METRIC_TRACE, ["a", "b"], 1, size_cap=5,
                                     prop_config=PropConfig(ops=frozenset({"or"}))))
        ors = [f for f in fs if isinstance(f, Prop)]
        assert all(f.subs[0].key() <= f.subs[1].key() for f in ors)
        assert Prop("or", (), (Modal("b", TRUE), Modal("a", TRUE))) not in ors

    def test_whitelist_respected(self):
        for sem in SEMANTICS:
            for f in enumerate_formulas(sem, ["a"], 2, prop_config=PropConfig.full(sem, grid=0.5)):
                assert ops_used(f) <= WHITELISTS[sem]


class TestEvaluation:
    def test_stream_values(self):
        L = validate_metric(["a", "b"], [[0, .8], [.8, 0]])
        f = {"v": .75, "w": .25}
        at = lambda lab, p: apply_modality(STREAM_BRANCHING, L, lab, p, f)  # noqa: E731
        assert at("a", ("a", "v")) == pytest.approx(.75)
        assert at("a", ("b", "w")) == pytest.approx(.2)
        assert abs(at("b", ("a", "v")) - at("b", ("b", "w"))) == pytest.approx(.05)

    def test_fig1_discrete(self):
        vals = evaluate(parse_formula("<a><a>1"), fig1_system(), PROB_TRACE)
        assert vals["x"] == pytest.approx(.5) and vals["y"] == 0

    def test_const(self):
        assert set(evaluate(TRUE, fig1_system(), PROB_TRACE).values()) == {1.0}

    @pytest.mark.parametrize("sem", SEMANTICS)
    def test_model_matches_reference(self, sem):
        rng = np.random.default_rng(30)
        cfg = PropConfig.full(sem, grid=0.25)
        for _ in range(8):
            c = random_system(rng, SYSTEM_OF[sem], n_states=4)
            labels = list(c.labels.points)
            fs = list(islice(enumerate_formulas(sem, labels, 2, prop_config=cfg), 150))
            for phi in fs:
                vals = evaluate(phi, c, sem)
                for x in c.states:
                    assert vals[x] == pytest.approx(reference_eval(phi, c, sem, x), abs=1e-12)

    def test_undeclared_label(self):
        with pytest.raises(WhitelistError):
            evaluate(parse_formula("<z>1"), fig1_system(), PROB_TRACE)


class TestModalSignature:
    @pytest.mark.parametrize("sem", SEMANTICS)
    def test_ops_nonexpansive(self, sem):
        worst = ModalSignature.of(sem).nonexpansive_on_grid(0.1)
        assert set(worst) == WHITELISTS[sem]
        assert all(v <= 1e-9 for v in worst.values())


class TestLogicalDistance:
    def test_self(self):
        assert logical_distance(fig1_system(.5), PROB_TRACE, "x", "x", 3).value == 0

    def test_fig1_discrete(self):
        ld = logical_distance(fig1_system(), PROB_TRACE, "x", "y", 3)
        assert ld.value == pytest.approx(.5) and str(ld.formula) == "<a><a>1"

    def test_metric_singletons(self):
        ld = logical_distance(corpus.load("metric_ab"), METRIC_TRACE, "x", "y", 1)
        assert ld.value == pytest.approx(.3) and str(ld.formula) == "<a>1"

    def test_fig1_metric_per_depth(self):
        ld = logical_distance(fig1_system(.5), PROB_TRACE, "x", "y", 4)
        assert ld.per_depth == pytest.approx((0, 0, .125, .1875, .21875), abs=1e-12)
        assert ld.value <= .25 + 1e-6

    def test_exact_depth(self):
        c = corpus.load("metric_ab")
        assert logical_distance(c, METRIC_TRACE, "x", "y", 2, exact_depth=True).value == 0

    def test_layers_dedupe(self):
        m = Model(fig1_system(), PROB_TRACE)
        layers = formula_layers(m, 3)
        for layer in layers:
            keys = {tuple(np.round(v, 12)) for v in layer.vecs}
            assert len(keys) == len(layer.vecs)
            for v, phi in zip(layer.vecs, layer.formulas):
                assert phi.depth == layer.depth
                assert np.allclose(m.evaluate(phi), v)

    def test_prop_layers_respect_cap(self):
        m = Model(corpus.load("stream"), STREAM_BRANCHING)
        cfg = PropConfig.full(STREAM_BRANCHING, max_per_layer=10)
        for layer in formula_layers(m, 2, cfg):
            assert len(layer.vecs) <= 10
            for v, phi in zip(layer.vecs, layer.formulas):
                assert np.allclose(m.evaluate(phi), v)


class TestWitness:
    def test_metric(self):
        phi = witness_search(corpus.load("metric_ab"), METRIC_TRACE, "x", "y", 1, .3)
        assert str(phi) == "<a>1"

    def test_fuzzy_word(self):
        c = corpus.load("fuzzy_chain")
        target = depth_distance(c, FUZZY_TRACE, "x", "x2", 2)
        phi = witness_search(c, FUZZY_TRACE, "x", "x2", 2, target)
        assert formula_word(phi) == ("a", "b")

    def test_fig1_metric_not_found(self):
        with pytest.raises(NotFound) as e:
            witness_search(fig1_system(.5), PROB_TRACE, "x", "y", 4, .5)
        assert e.value.best_gap <= .25 + 1e-6


class TestInvariance:
    def test_fig1_metric_strict(self):
        rep = invariance_check(fig1_system(.5), PROB_TRACE, 3)
        pair = next(p for p in rep.pairs if {p.x, p.y} == {"x", "y"})
        assert pair.status == "strict" and rep.ok

    def test_single_state(self):
        c = random_system(np.random.default_rng(31), "prob_ts", n_states=1)
        assert invariance_check(c, PROB_TRACE, 3).pairs == ()

    @pytest.mark.parametrize("name", corpus.system_names())
    def test_corpus(self, name):
        c = corpus.load(name)
        from gradedsem.graded import SEMANTICS_OF
        sem = SEMANTICS_OF[c.kind]
        assert invariance_check(c, sem, 3, PropConfig.full(sem)).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(SEMANTICS))
def test_formula_evaluation_is_nonexpansive(seed, sem):
    rng = np.random.default_rng(seed)
    c = random_system(rng, SYSTEM_OF[sem], n_states=4)
    cfg = PropConfig.full(sem, grid=0.25, max_per_layer=24)
    rep = invariance_check(c, sem, 2, cfg)
    assert rep.ok, rep.violations


def test_stream_normed_family():
    L = validate_metric(["a", "b"], [[0, .8], [.8, 0]])
    A0 = validate_metric(["v", "w"], [[0, .5], [.5, 0]])
    X = k_tensor(L, A0, SUP)
    assert len(X) == 4 and discrete_space(["a"]).is_discrete


def test_fuzzy_argmax_word_is_exact():
    c = corpus.load("fuzzy_chain")
    tr = {x: brute_traces(c, FUZZY_TRACE, x, 2) for x in ("x", "x2")}
    best = max(all_words(["a", "b"], 2), key=lambda w: abs(tr["x"].get(w, 0) - tr["x2"].get(w, 0)))
    vals = evaluate(word_formula(best), c, FUZZY_TRACE)
    assert vals["x"] == tr["x"][best] and vals["x2"] == tr["x2"][best]
    assert behavioural_distance(c, FUZZY_TRACE, "x", "x2", 2).max == pytest.approx(.4)
