import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsos_wb.analysis.criteria import leaf_term
from gsos_wb.corpus import builtin_names
from gsos_wb.lts import LtsBehavior
from gsos_wb.order import UnknownState, rt_close
from gsos_wb.semantics import (
    OneLayerContext,
    apply_rules,
    check_saturation_invariance,
    contexts,
    lambda_extend,
    model_respects_rules,
    operational_model,
    saturate_model,
)
from gsos_wb.terms import Leaf, Node, flatten, map_leaves
from gsos_wb.while_lang import DONE, parse_program

from conftest import builtin_language, while_language
from oracles import ccs_step

NIL = Node("nil")
X = Leaf("x")
seeds = st.integers(0, 2**32 - 1)


def fs(*pairs):
    return frozenset(pairs)


# one-layer rule application


def test_par_applies_com_and_syn(spc):
    f = {"p": fs(("a", "p'")), "q": fs(("abar", "q'"))}
    out = apply_rules(spc, OneLayerContext("par", (), ("p", "q")), f)
    par = lambda l, r: Node("par", (), (Leaf(l), Leaf(r)))  # noqa: E731
    assert out == fs(("a", par("p'", "q")), ("abar", par("p", "q'")), ("tau", par("p'", "q'")))


def test_cur_rule_fires_on_both_premises():
    lang = builtin_language("cur-ext")
    f = {"p": fs(("a", "q"), ("b", "w"))}
    out = apply_rules(lang, OneLayerContext("brk", (), ("p",)), f)
    assert out == fs(("c", Node("brk", (), (Leaf("q"),))))


def test_prefix_ignores_argument_behaviour(spc):
    out = apply_rules(spc, OneLayerContext("pre", ("a",), ("x",)), {"x": frozenset()})
    assert out == fs(("a", X))


def test_negative_premise_is_closed_world():
    lang = builtin_language("neg-ext")
    ctx = OneLayerContext("brk", (), ("p",))
    assert ("b", NIL) in apply_rules(lang, ctx, {"p": fs(("tau", "p"))})
    assert ("b", NIL) not in apply_rules(lang, ctx, {"p": fs(("a", "p"))})


def test_unknown_state(spc):
    with pytest.raises(UnknownState):
        apply_rules(spc, OneLayerContext("sum", (), ("x", "ghost")), {"x": frozenset()})


def test_contexts_enumerate_all_instances(spc):
    ctxs = contexts(spc, ["x", "y"])
    # nil, three prefixes over two states, sum and par over four pairs
    assert len(ctxs) == 1 + 3 * 2 + 2 * 4


# structural extension


def test_extend_leaf():
    lang = builtin_language("ccs-core")
    assert lambda_extend(lang, {"x": fs(("a", "y"))}, X) == fs(("a", Leaf("y")))


def test_extend_one_layer_deep():
    lang = builtin_language("ccs-core")
    t = Node("par", (), (Node("pre", ("a",), (X,)), Leaf("y")))
    out = lambda_extend(lang, {"x": frozenset(), "y": frozenset()}, t)
    assert out == fs(("a", Node("par", (), (X, Leaf("y")))))


def test_extend_matches_direct_interpreter(spc):
    coaction = spc.signature.pairs
    for t in spc.enumerate_terms(2):
        assert lambda_extend(spc, {}, t) == ccs_step(t, coaction)


def lts_table(lang, seed, states=("x", "y")):
    beh = LtsBehavior(["tau", "a", "abar"])
    return beh.sample_table(list(states), random.Random(seed))


@given(seeds)
def test_extend_unit_axiom(seed):
    lang = builtin_language("spc")
    f = lts_table(lang, seed)
    for x in f:
        assert lambda_extend(lang, f, Leaf(x)) == lang.behavior.map_states(Leaf, f[x])


@given(seeds, st.integers(0, 10_000))
def test_extend_multiplication_axiom(seed, pick):
    # extending over a flattened term equals extending over the nested one, then flattening
    lang = builtin_language("spc")
    f = lts_table(lang, seed)
    inner = lang.enumerate_terms(1, ["x", "y"])
    outer = lang.enumerate_terms(1, ["s", "t"])
    rng = random.Random(pick)
    sub = {"s": rng.choice(inner), "t": rng.choice(inner)}
    nested = map_leaves(lambda v: Leaf(sub[v]), rng.choice(outer))

    def g(s):
        return lambda_extend(lang, f, s)

    lhs = lambda_extend(lang, f, flatten(nested))
    rhs = lang.behavior.map_states(flatten, lambda_extend(lang, g, nested))
    assert lhs == rhs


def renamed(f, r):
    return {r[x]: frozenset((l, r[y]) for l, y in v) for x, v in f.items()}


@pytest.mark.parametrize("name", builtin_names())
@given(seed=seeds)
def test_apply_rules_is_natural(name, seed):
    lang = builtin_language(name)
    rng = random.Random(seed)
    states = ["x", "y", "z"]
    f = LtsBehavior(lang.signature.all_labels).sample_table(states, rng)
    image = states[:]
    rng.shuffle(image)
    r = dict(zip(states, image))
    for ctx in contexts(lang, ["x", "y"]):
        moved = OneLayerContext(ctx.op, ctx.params, tuple(r[a] for a in ctx.args))
        expected = lang.behavior.map_states(lambda t: map_leaves(lambda v: Leaf(r[v]), t), apply_rules(lang, ctx, f))
        assert apply_rules(lang, moved, renamed(f, r)) == expected


@pytest.mark.parametrize("name", ["ccs-core", "spc", "imp-ext", "cur-ext", "oba-ext", "pause-ext"])
@given(seed=seeds)
def test_positive_specs_are_monotone(name, seed):
    lang = builtin_language(name)
    rng = random.Random(seed)
    beh = LtsBehavior(lang.signature.all_labels)
    f = beh.sample_table(["x", "y"], rng)
    g = beh.join_tables(f, beh.sample_table(["x", "y"], rng))
    for ctx in contexts(lang, ["x", "y"]):
        assert apply_rules(lang, ctx, f) <= apply_rules(lang, ctx, g)


# operational models


def test_model_of_tau_a_0(spc):
    t = spc.parse_term("tau.a.0")
    model = operational_model(spc, [t])
    a0 = spc.parse_term("a.0")
    assert set(model.states) == {t, a0, NIL}
    assert model.h[t] == fs(("tau", a0)) and model.h[a0] == fs(("a", NIL)) and model.h[NIL] == frozenset()
    sat = saturate_model(model)
    assert sat.saturated[t] == fs(("tau", t), ("tau", a0), ("a", NIL))


def test_model_of_nil(spc):
    model = operational_model(spc, [NIL])
    assert model.states == [NIL] and model.h[NIL] == frozenset()


def test_while_model_of_skip_skip():
    wl = while_language()
    p = parse_program("skip ; skip")
    model = operational_model(wl, [p])
    skip = parse_program("skip")
    assert model.h[p] == frozenset((s, s, skip) for s in wl.stores)
    assert model.h[skip] == frozenset((s, s, DONE) for s in wl.stores)


def test_saturation_is_idempotent(spc):
    roots = spc.enumerate_terms(2)[:40]
    once = saturate_model(operational_model(spc, roots))
    again = rt_close(spc.behavior, once.saturated)
    assert again == once.saturated


@pytest.mark.parametrize("name", builtin_names())
def test_models_respect_the_rules(name):
    lang = builtin_language(name)
    model = operational_model(lang, lang.enumerate_terms(2))
    assert model_respects_rules(model)


def test_model_json_shape(spc):
    model = saturate_model(operational_model(spc, [spc.parse_term("tau.a.0")]))
    doc = model.to_dict()
    assert doc["states"] == ["0", "a.0", "tau.a.0"]
    assert ["a.0", "a", "0"] in doc["transitions"]
    assert ["tau.a.0", "a", "0"] in doc["saturated"]


def test_while_model_json_marks_termination():
    wl = while_language()
    doc = operational_model(wl, [parse_program("skip")]).to_dict()
    assert ["skip", "(0,0)->(0,0)", "✓"] in doc["transitions"]


# saturation invariance


@given(seeds)
def test_invariance_holds_for_ccs_core(seed):
    lang = builtin_language("ccs-core")
    f = lts_table(lang, seed)
    roots = [c.term for c in contexts(lang, ["x", "y"])]
    assert check_saturation_invariance(lang, f, roots).passed


def test_invariance_fails_for_choice(spc):
    f = {"x": frozenset(), "y": frozenset()}
    report = check_saturation_invariance(spc, f, [leaf_term(spc, "sum", "x", "y")])
    assert report.failed
    (w,) = report.witnesses
    assert w == {"term": "x + y", "transition": "(tau,x)", "side": "f*-only"}


def test_invariance_on_saturated_table(spc):
    f = rt_close(spc.behavior, lts_table(spc, 3))
    roots = [c.term for c in contexts(spc, ["x", "y"])]
    assert check_saturation_invariance(spc, f, roots).passed


def test_invariance_notes_negative_premises():
    lang = builtin_language("neg-ext")
    report = check_saturation_invariance(lang, {"x": frozenset()}, [X])
    assert any("not positive" in n for n in report.notes)
