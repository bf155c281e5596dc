import random

from hypothesis import given
from hypothesis import strategies as st

from gsos_wb.lts import LtsBehavior, compose_labels

LTS = LtsBehavior(["tau", "a", "abar", "b"])


def test_unit_is_tau_self_loop():
    assert LTS.unit("x") == frozenset({("tau", "x")})


def test_visible_then_tau():
    assert LTS.compose({"y": frozenset({("tau", "z")})}, frozenset({("a", "y")})) == frozenset({("a", "z")})


def test_two_visible_steps_vanish():
    assert LTS.compose({"y": frozenset({("b", "z")})}, frozenset({("a", "y")})) == frozenset()


def test_compose_with_unit_table():
    assert LTS.compose(LTS.unit_table(["y"]), frozenset({("tau", "y")})) == frozenset({("tau", "y")})


def test_label_composition_table():
    assert compose_labels("tau", "tau") == "tau"
    assert compose_labels("tau", "a") == "a"
    assert compose_labels("a", "tau") == "a"
    assert compose_labels("a", "b") is None


def test_order_is_inclusion():
    v, w = frozenset({("a", "x")}), frozenset({("a", "x"), ("tau", "y")})
    assert LTS.leq(v, w) and not LTS.leq(w, v)
    assert LTS.join(v, w) == w
    assert LTS.bottom == frozenset()


def test_canonical_printing():
    v = frozenset({("tau", "y"), ("a", "x"), ("abar", "x")})
    assert LTS.format_value(v) == "{ (tau,y), (a,x), (abar,x) }"
    assert LTS.format_value(frozenset()) == "{}"


def test_value_space_and_atoms():
    beh = LtsBehavior(["a", "abar"])
    assert beh.labels == ["tau", "a", "abar"]
    assert len(beh.atoms(["x", "y"])) == 6
    assert beh.value_space_size(2) == 64
    assert len(set(beh.enumerate_values(["x", "y"]))) == 64


def test_tau_always_declared():
    assert LtsBehavior([]).labels == ["tau"]


@given(st.integers(0, 2**32 - 1))
def test_observations_are_the_pairs(seed):
    v = LTS.random_value(["x", "y"], random.Random(seed))
    assert set(LTS.observations(v)) == set(v)
    assert LTS.support(v) == {y for _, y in v}
