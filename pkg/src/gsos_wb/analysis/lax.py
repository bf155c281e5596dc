"""Lax-model check: rule-derived weak behaviour of composites is really weak behaviour.

For a closed fragment ``S`` (closed under subterms and transitions) every
composite ``op(t1, ..., tn)`` with ``ti`` in ``S`` must satisfy
``rho(op, h*(t1), ..., h*(tn)) <= h*(op(t1, ..., tn))``, where ``h*`` is the
saturated operational model.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from ..order import DEFAULT_MAX_ITERATIONS, FuelExhausted, reachable, rt_close
from ..report import INCONCLUSIVE, CheckReport
from ..semantics import Language, TermStep
from ..terms import Node, Term, state_key, subterms


def closed_fragment(lang: Language, roots: Iterable[Term], step: TermStep, max_states: int) -> list[Term]:
    """Least set of terms containing ``roots`` closed under subterms and transitions."""
    frag: dict = {}
    todo = list(roots)
    while todo:
        new = reachable(lang.behavior, step, todo, max_states)
        todo = []
        for t in new:
            for s in subterms(t):
                if s not in frag:
                    frag[s] = True
                    todo.append(s)
        if len(frag) > max_states:
            raise FuelExhausted(f"fragment exceeds {max_states} terms")
    return sorted(frag, key=state_key)


def lax_check(
    lang: Language,
    roots: Iterable[Term],
    *,
    per_root: bool = False,
    max_states: int = 200_000,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    max_witnesses: int = 5,
) -> CheckReport:
    """Check the lax square on the fragment generated by ``roots``.

    With ``per_root`` every root gets its own fragment and contexts range
    over that fragment only; the saturation is still computed once for all
    composites.
    """
    roots = list(roots)
    report = CheckReport("lax-model", mode="per-root fragments" if per_root else "fragment")
    beh, fmt = lang.behavior, lang.format_term
    step = TermStep(lang)
    groups = [[r] for r in roots] if per_root else [roots]
    try:
        seen_frag: dict = {}
        composites: dict = {}
        for group in groups:
            frag = closed_fragment(lang, group, step, max_states)
            seen_frag.update(dict.fromkeys(frag))
            for inst in lang.instances():
                for args in itertools.product(frag, repeat=inst.arity):
                    composites.setdefault(Node(inst.op, inst.params, args), None)
        # roots first, so their own failures head the report
        rootset = set(roots)
        ordered = sorted(composites, key=lambda c: (c not in rootset, state_key(c)))
        star = rt_close(beh, step, list(seen_frag) + ordered, max_states=max_states, max_iterations=max_iterations)
    except FuelExhausted as e:
        report.verdict = INCONCLUSIVE
        report.notes.append(str(e))
        return report
    report.details = {
        "roots": len(roots),
        "fragment": len(seen_frag),
        "composites": len(ordered),
    }
    for c in ordered:
        report.cases += 1
        derived = lang.rho(c.op, c.params, c.children, [star[a] for a in c.children], lambda t: t)
        extra = beh.difference(derived, star[c])
        if extra:
            report.fail(
                {
                    "composite": fmt(c),
                    "transition": beh.format_element(extra[0], fmt),
                    "side": "derived-only",
                }
            )
            if len(report.witnesses) >= max_witnesses:
                break
    return report


__all__ = ["closed_fragment", "lax_check"]
