"""Linter for the simply WB cool rule format.

A language is simply WB cool when it is positive and

1. every operator is straight (no variable tested by two premises),
2. the only rules with tau-premises are patience rules,
3. every active argument has a patience rule,
4. every receiving argument has a patience rule,
5. every operator is smooth (no variable both tested and kept in the target).

Operators are taken per instance, so ``pre[a]`` and ``pre[b]`` are checked
separately.  Each violation is reported once per offending rule (conditions
1, 2 and 5) or once per offending argument (conditions 3 and 4).
"""

from __future__ import annotations

from collections import Counter

from ..dsl import GroundRule, Spec, instantiate_schemas
from ..report import CheckReport
from ..terms import TAU, Leaf, Node, Term, subterms

POSITIVITY = "positivity"


def op_name(op: str, params: tuple) -> str:
    return f"{op}[{','.join(map(str, params))}]" if params else op


def is_patience_rule(rule: GroundRule) -> int | None:
    """The argument index a patience rule relays, or ``None``."""
    if rule.negative or len(rule.positive) != 1 or rule.label != TAU:
        return None
    i, label, y = rule.positive[0]
    if label != TAU:
        return None
    children = tuple(Leaf(y) if k == i else Leaf(v) for k, v in enumerate(rule.source_vars))
    if rule.target == Node(rule.op, rule.params, children):
        return i
    return None


def _vars(t: Term) -> set:
    return {s.value for s in subterms(t) if isinstance(s, Leaf)}


def check_simply_wb_cool(spec: Spec, rules: list[GroundRule] | None = None) -> CheckReport:
    rules = rules if rules is not None else instantiate_schemas(spec)
    report = CheckReport("simply-wb-cool", mode="syntactic", cases=len(rules))
    found: list[tuple] = []

    patience = {(r.op, r.params, i) for r in rules if (i := is_patience_rule(r)) is not None}

    def add(cond, rule: GroundRule, op: str, params: tuple, reason: str, arg: int | None = None):
        found.append((cond, rule, op, params, arg, reason))

    for r in rules:
        for i, label in r.negative:
            add(POSITIVITY, r, r.op, r.params, f"negative premise {r.source_vars[i]} -{label}-/>")
            break

    for r in rules:
        tested = Counter(r.source_vars[i] for i, _, _ in r.positive)
        tested.update(r.source_vars[i] for i, _ in r.negative)
        for v, n in tested.items():
            if n > 1:
                add(1, r, r.op, r.params, f"variable {v} is tested by {n} premises")

    for r in rules:
        has_tau = any(l == TAU for _, l, _ in r.positive) or any(l == TAU for _, l in r.negative)
        if has_tau and is_patience_rule(r) is None:
            add(2, r, r.op, r.params, "rule has a tau-premise but is not a patience rule")

    seen = set()
    for r in rules:
        for i in sorted({i for i, _, _ in r.positive} | {i for i, _ in r.negative}):
            key = (r.op, r.params, i)
            if key not in patience and key not in seen:
                seen.add(key)
                add(3, r, r.op, r.params, f"argument {i + 1} is active but has no patience rule", i)

    seen = set()
    for r in rules:
        receivers = {y for _, _, y in r.positive}
        for sub in subterms(r.target):
            if not isinstance(sub, Node):
                continue
            for i, child in enumerate(sub.children):
                if not (receivers & _vars(child)):
                    continue
                key = (sub.op, sub.params, i)
                if key not in patience and key not in seen:
                    seen.add(key)
                    add(4, r, sub.op, sub.params, f"argument {i + 1} is receiving but has no patience rule", i)

    for r in rules:
        kept = _vars(r.target) & ({r.source_vars[i] for i, _, _ in r.positive} | {r.source_vars[i] for i, _ in r.negative})
        for v in sorted(kept):
            add(5, r, r.op, r.params, f"variable {v} is tested by a premise and occurs in the target")
            break

    order = {POSITIVITY: 0, 1: 1, 2: 2, 3: 3, 4: 4, 5: 5}
    rule_pos = {id(r): k for k, r in enumerate(rules)}
    found.sort(key=lambda e: (order[e[0]], rule_pos[id(e[1])]))
    for cond, rule, op, params, arg, reason in found:
        w = {"condition": cond, "rule": rule.name, "operator": op_name(op, params), "reason": reason}
        if arg is not None:
            w["argument"] = arg + 1
        report.fail(w)
    report.details["conditions"] = sorted({w["condition"] for w in report.witnesses}, key=lambda c: order[c])
    if report.witnesses:
        report.details["headline"] = violation_line(report.witnesses[0])
    return report


def violation_line(w: dict) -> str:
    if w["condition"] == POSITIVITY:
        return f"not positive: {w['rule']} has a {w['reason']}"
    return f"condition {w['condition']} violated by {w['rule']}: {w['reason']}"


def violated_conditions(report: CheckReport, operators: set | None = None) -> set:
    """Conditions violated, optionally restricted to the named operators."""
    return {
        w["condition"]
        for w in report.witnesses
        if operators is None or w["operator"].split("[")[0] in operators
    }


__all__ = [
    "POSITIVITY",
    "check_simply_wb_cool",
    "is_patience_rule",
    "op_name",
    "violated_conditions",
    "violation_line",
]
