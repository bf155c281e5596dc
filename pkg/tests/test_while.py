import pickle

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsos_wb.order import rt_close
from gsos_wb.semantics import TermStep, lambda_extend, operational_model, saturate_model
from gsos_wb.terms import Leaf, Node, ParseError, enumerate_terms
from gsos_wb.while_lang import (
    DONE,
    SEQ,
    SKIP,
    BinOp,
    Const,
    Var,
    WhileBehavior,
    WhileLanguage,
    eval_expr,
    format_expr,
    format_program,
    parse_program,
)

from oracles import while_final_stores

SKIP_T = Node(SKIP)


# expressions


def test_eval_examples():
    assert eval_expr(Const(0), (2, 1), ("v", "w"), 4) == 0
    assert eval_expr(Var("v"), (3, 1), ("v", "w"), 4) == 3
    assert eval_expr(BinOp("+", Const(3), Const(2)), (0, 0), ("v", "w"), 4) == 1


@given(st.integers(0, 3), st.integers(0, 3), st.sampled_from(["+", "-", "*", "==", "<"]))
def test_eval_matches_integer_arithmetic_mod_m(a, b, op):
    ref = {"+": a + b, "-": a - b, "*": a * b, "==": int(a == b), "<": int(a < b)}[op] % 4
    assert eval_expr(BinOp(op, Var("v"), Var("w")), (a, b), ("v", "w"), 4) == ref


def test_expression_printing_round_trip():
    for text in ["v + 1", "v * (w + 1)", "v - w - 1", "v < 3", "v == w + 1"]:
        prog = parse_program(f"v := {text}")
        assert format_expr(prog.params[1]) == text


# behaviour

STORES = [(0,), (1,)]
BEH = WhileBehavior(STORES)


def test_unit_is_silent_step_per_store():
    assert BEH.unit("x") == frozenset({((0,), (0,), "x"), ((1,), (1,), "x")})


def test_done_ignores_continuation():
    v = frozenset({((0,), (1,), DONE)})
    assert BEH.compose({}, v) == v


def test_step_runs_continuation_at_intermediate_store():
    v = frozenset({((0,), (1,), "x")})
    g = {"x": frozenset({((1,), (0,), DONE), ((0,), (1,), "y")})}
    assert BEH.compose(g, v) == frozenset({((0,), (0,), DONE)})


def test_compose_with_unit_table():
    v = frozenset({((0,), (1,), "x"), ((1,), (1,), DONE)})
    assert BEH.compose(BEH.unit_table(["x"]), v) == v


def test_done_is_a_singleton_and_pickles():
    assert pickle.loads(pickle.dumps(DONE)) is DONE
    assert str(DONE) == "✓"


def test_space_size_and_printing():
    assert BEH.value_space_size(1) == 2 ** (4 * 2)
    assert BEH.format_element(((0,), (1,), DONE)) == "((0)->(1),✓)"
    assert BEH.format_value(frozenset()) == "{}"


# language and rules

WL = WhileLanguage()


def test_stores_and_instances():
    assert len(WL.stores) == 16
    ops = [(i.op, i.arity) for i in WL.instances()]
    assert ops.count(("asn", 0)) == 4 and ops.count(("while", 1)) == 2
    with pytest.raises(ValueError):
        WhileLanguage(modulus=0)
    with pytest.raises(ValueError):
        WhileLanguage(variables=())


def test_skip_rule():
    out = WL.rho(SKIP, (), (), (), Leaf)
    assert out == frozenset((s, s, DONE) for s in WL.stores)


def test_while_false_guard_terminates():
    loop = parse_program("while 0 { v := v + 1 }")
    out = WL.rho("while", loop.params, loop.children, [None], lambda t: t)
    assert out == frozenset((s, s, DONE) for s in WL.stores)


def test_while_true_guard_unfolds():
    loop = parse_program("while v { skip }")
    out = dict(((s, s1), r) for s, s1, r in WL.rho("while", loop.params, loop.children, [None], lambda t: t))
    assert out[((0, 0), (0, 0))] is DONE
    assert out[((1, 0), (1, 0))] == Node(SEQ, (), (SKIP_T, loop))


def test_seq_with_terminating_first_step():
    f = {"x": frozenset((s, s, DONE) for s in WL.stores)}
    out = lambda_extend(WL, f, Node(SEQ, (), (Leaf("x"), SKIP_T)))
    assert out == frozenset((s, s, SKIP_T) for s in WL.stores)


def test_program_syntax_round_trip():
    for text in ["skip", "v := 0 ; w := v + 1", "while v { v := v - 1 } ; skip", "x ; (y ; z)"]:
        t = parse_program(text)
        assert format_program(t) == text
        assert parse_program(format_program(t)) is t


def test_seq_is_left_associative():
    t = parse_program("skip ; skip ; skip")
    assert t.children[0] == Node(SEQ, (), (SKIP_T, SKIP_T))


def test_program_parse_errors():
    with pytest.raises(ParseError):
        parse_program("q := 1")
    with pytest.raises(ParseError):
        parse_program("v := u")
    with pytest.raises(ParseError):
        parse_program("while v { skip")


def test_enumeration_is_deterministic_and_closed():
    terms = WL.enumerate_terms(1)
    assert terms == WL.enumerate_terms(1)
    assert all(t.depth <= 1 for t in terms)
    # skip, four assignments, 5*5 seqs, 2*5 loops
    assert len(terms) == 5 + 25 + 10


# evaluation against a big-step interpreter


def final_stores(lang, program, s):
    star = saturate_model(operational_model(lang, [program])).saturated
    return {s2 for s1, s2, r in star[program] if s1 == s and r is DONE}


PROGRAMS = [
    "v := 0 ; while v < 3 { v := v + 1 } ; skip",
    "w := v ; while w { w := w - 1 ; v := v + 2 }",
    "while v == w { v := v + 1 }",
    "v := v * w ; w := 3",
]


@pytest.mark.parametrize("text", PROGRAMS)
def test_saturation_matches_big_step(text):
    p = parse_program(text)
    for s in WL.stores:
        assert final_stores(WL, p, s) == while_final_stores(WL, p, s)


def test_divergent_loop_has_no_final_store():
    p = parse_program("while 1 { skip }")
    for s in WL.stores:
        assert final_stores(WL, p, s) == set() == while_final_stores(WL, p, s)


def test_rules_are_deterministic_on_closed_programs():
    for root in enumerate_terms(WL.instances(), 2)[:300]:
        model = operational_model(WL, [root])
        for v in model.h.values():
            for s in WL.stores:
                assert len([e for e in v if e[0] == s]) == 1


def test_skip_skip_weak_successors():
    p = parse_program("skip ; skip")
    star = rt_close(WL.behavior, TermStep(WL), [p])
    for s in WL.stores:
        assert {(s1, r) for s0, s1, r in star[p] if s0 == s} == {(s, p), (s, SKIP_T), (s, DONE)}
