"""Hand-picked transition tables that exhibit known criterion failures and passes.

Each case fixes an abstract carrier, a transition table over it and the
one-layer contexts to inspect.  The checkers run every applicable case
before enumerating or sampling, so the classic counterexamples are always
reproduced regardless of budget.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..terms import PAR, TAU
from ..while_lang import DONE

MONOTONICITY, UNITALITY, OBSERVABILITY = "monotonicity", "unitality", "observability"


@dataclass(frozen=True)
class TargetedCase:
    name: str
    criterion: str
    table: dict
    contexts: tuple  # (op, params, args)
    specs: tuple | None = None  # language names; None means any language with the operators
    upper: dict | None = None  # the larger table of a monotonicity pair
    language: str = "lts"
    expect: str | None = None  # "fail" or "pass", informational

    def applies_to(self, lang) -> bool:
        kind = "while" if lang.name == "while" else "lts"
        if kind != self.language:
            return False
        if self.specs is not None:
            return lang.name in self.specs
        ops = {(i.op, i.params, i.arity) for i in lang.instances()}
        return all((op, params, len(args)) in ops for op, params, args in self.contexts)


NIL = frozenset()

P, P1, P2, Q, Q1, Q2, W = "p", "p'", "p''", "q", "q'", "q''", "w"

LTS_CASES = [
    TargetedCase(
        "neg",
        MONOTONICITY,
        {P: frozenset({(TAU, P1)}), P1: NIL, Q: NIL},
        (("brk", (), (P,)),),
        specs=("neg-ext",),
        upper={P: frozenset({("a", Q), (TAU, P1)}), P1: NIL, Q: NIL},
        expect="fail",
    ),
    TargetedCase("imp", UNITALITY, {"x": NIL}, (("brk", (), ("x",)),), specs=("imp-ext",), expect="fail"),
    TargetedCase(
        "sum",
        UNITALITY,
        {"x": NIL, "y": NIL},
        (("sum", (), ("x", "y")),),
        specs=("spc", "pause-ext"),
        expect="fail",
    ),
    TargetedCase(
        "cur",
        OBSERVABILITY,
        {P: frozenset({("a", Q), (TAU, W)}), Q: frozenset({(TAU, Q)}), W: frozenset({("b", W)})},
        (("brk", (), (P,)),),
        specs=("cur-ext",),
        expect="fail",
    ),
    TargetedCase(
        "oba",
        OBSERVABILITY,
        {P: frozenset({(TAU, Q)}), Q: frozenset({("a", W)}), W: NIL},
        (("brk", (), (P,)),),
        specs=("oba-ext",),
        expect="fail",
    ),
    TargetedCase(
        "pause",
        OBSERVABILITY,
        {P: frozenset({(TAU, Q)}), Q: frozenset({("a", W)}), W: NIL},
        (("brk", (), (P,)),),
        specs=("pause-ext",),
        expect="fail",
    ),
]


def syn_table(case: int) -> dict:
    """The four ways a two-step table lets ``syn`` fire on ``p || q``."""
    p_first, q_first = {1: (TAU, TAU), 2: (TAU, "abar"), 3: ("a", "abar"), 4: ("a", TAU)}[case]
    p_second = "a" if p_first == TAU else TAU
    q_second = "abar" if q_first == TAU else TAU
    return {
        P: frozenset({(p_first, P1)}),
        P1: frozenset({(p_second, P2)}),
        P2: NIL,
        Q: frozenset({(q_first, Q1)}),
        Q1: frozenset({(q_second, Q2)}),
        Q2: NIL,
    }


SYN_CASES = [
    TargetedCase(f"syn{i}", OBSERVABILITY, syn_table(i), ((PAR, (), (P, Q)),), expect="pass") for i in (1, 2, 3, 4)
]


def while_cases(stores: list) -> list[TargetedCase]:
    """Sequential-composition tables covering non-terminating and terminating steps."""
    s0, s1 = stores[0], stores[-1]
    mid = stores[len(stores) // 2]
    step_then_stop = {
        "x": frozenset({(s0, mid, "x'")}),
        "x'": frozenset({(mid, s1, DONE)}),
        "y": frozenset({(s1, s0, DONE)}),
    }
    stop_now = {
        "x": frozenset({(s0, s1, DONE), (s1, mid, "y")}),
        "x'": NIL,
        "y": frozenset({(mid, mid, "y")}),
    }
    ctx = (("seq", (), ("x", "y")),)
    out = []
    for name, table in (("seq-step", step_then_stop), ("seq-stop", stop_now)):
        for crit in (UNITALITY, OBSERVABILITY):
            out.append(TargetedCase(f"{name}", crit, table, ctx, language="while", expect="pass"))
    return out


def targeted_cases(lang, criterion: str) -> list[TargetedCase]:
    if lang.name == "while":
        pool = while_cases(lang.stores)
    else:
        pool = LTS_CASES + SYN_CASES
    return [c for c in pool if c.criterion == criterion and c.applies_to(lang)]


@dataclass(frozen=True)
class TargetedPair:
    """Argument tuples expected to be equivalent while their composites are not."""

    name: str
    spec: str
    op: str
    left: tuple
    right: tuple


TARGETED_PAIRS = [
    TargetedPair("neg", "neg-ext", "brk", ("tau.a.0",), ("a.0",)),
    TargetedPair("imp", "imp-ext", "brk", ("0",), ("tau.0",)),
    TargetedPair("oba", "oba-ext", "brk", ("a.0",), ("tau.a.0",)),
    TargetedPair("pause", "pause-ext", "brk", ("a.0 + tau.b.0",), ("a.0 + tau.b.0 + b.0",)),
    TargetedPair("sum", "spc", "sum", ("a.0", "0"), ("a.0", "tau.0")),
]


def targeted_pairs(lang) -> list[TargetedPair]:
    return [p for p in TARGETED_PAIRS if p.spec == lang.name]


__all__ = [
    "LTS_CASES",
    "MONOTONICITY",
    "OBSERVABILITY",
    "SYN_CASES",
    "TARGETED_PAIRS",
    "UNITALITY",
    "TargetedCase",
    "TargetedPair",
    "syn_table",
    "targeted_cases",
    "targeted_pairs",
    "while_cases",
]
