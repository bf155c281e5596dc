"""Independent reference implementations used to cross-check the package.

Each oracle takes a different route from the code under test: explicit
relation algebra for weak transitions, greatest-fixpoint pruning for
bisimilarity, a direct structural interpreter for CCS with choice, and a
big-step evaluator for While programs.
"""

from __future__ import annotations

import itertools

TAU = "tau"


# weak transitions by relation algebra


def tau_star(table: dict) -> dict:
    """Reflexive-transitive closure of the tau relation, by repeated squaring."""
    reach = {x: {x} | {y for l, y in v if l == TAU} for x, v in table.items()}
    changed = True
    while changed:
        changed = False
        for x in reach:
            new = set().union(*(reach[y] for y in reach[x]))
            if not new <= reach[x]:
                reach[x] |= new
                changed = True
    return reach


def weak_closure(table: dict) -> dict:
    """``=tau=>`` and ``=a=> = tau* a tau*`` as a table of (label, state) pairs."""
    ts = tau_star(table)
    out = {}
    for x in table:
        pairs = {(TAU, y) for y in ts[x]}
        for y in ts[x]:
            for l, z in table[y]:
                if l != TAU:
                    pairs |= {(l, w) for w in ts[z]}
        out[x] = frozenset(pairs)
    return out


def lts_power(table: dict, n: int) -> dict:
    """``(id v f)^n`` computed as sets of label paths of length at most ``n``."""
    out = {}
    for x in table:
        frontier = {(TAU, x)}
        seen = set(frontier)
        for _ in range(n):
            nxt = set()
            for l, y in frontier:
                for m, z in table[y]:
                    if l == TAU:
                        nxt.add((m, z))
                    elif m == TAU:
                        nxt.add((l, z))
            frontier = nxt - seen
            seen |= nxt
        out[x] = frozenset(seen)
    return out


# bisimilarity by pruning


def greatest_bisimulation(table: dict, observe=lambda v: v) -> set:
    """Largest bisimulation on a finite table, obtained by deleting bad pairs."""
    states = list(table)
    rel = {(x, y) for x in states for y in states}
    changed = True
    while changed:
        changed = False
        for x, y in sorted(rel, key=repr):
            if not (_simulates(table, observe, rel, x, y) and _simulates(table, observe, rel, y, x)):
                rel.discard((x, y))
                changed = True
    return rel


def _simulates(table, observe, rel, x, y) -> bool:
    for k, x1 in observe(table[x]):
        if not any(k == m and (x1 == y1 or (x1, y1) in rel) for m, y1 in observe(table[y])):
            return False
    return True


# CCS with choice, by structural recursion


def ccs_step(t, coaction: dict) -> frozenset:
    """Transitions of a closed nil/pre/sum/par term, straight from the usual rules."""
    if t.op == "nil":
        return frozenset()
    if t.op == "pre":
        return frozenset({(t.params[0], t.children[0])})
    if t.op == "sum":
        return ccs_step(t.children[0], coaction) | ccs_step(t.children[1], coaction)
    if t.op == "par":
        p, q = t.children
        sp, sq = ccs_step(p, coaction), ccs_step(q, coaction)
        out = {(l, type(t)("par", (), (p1, q))) for l, p1 in sp}
        out |= {(l, type(t)("par", (), (p, q1))) for l, q1 in sq}
        for (l, p1), (m, q1) in itertools.product(sp, sq):
            if l != TAU and coaction.get(l) == m:
                out.add((TAU, type(t)("par", (), (p1, q1))))
        return frozenset(out)
    raise ValueError(t.op)


# While by big-step evaluation


def while_final_stores(lang, program, store, fuel: int = 10_000) -> set:
    """Final stores of a deterministic program, or the empty set if it diverges within ``fuel``."""
    stack = [program]
    s = store
    steps = 0
    while stack:
        steps += 1
        if steps > fuel:
            return set()
        p = stack.pop()
        if p.op == "skip":
            continue
        if p.op == "asn":
            var, e = p.params
            i = lang.variables.index(var)
            s = s[:i] + (lang.eval(e, s),) + s[i + 1 :]
        elif p.op == "seq":
            stack.append(p.children[1])
            stack.append(p.children[0])
        elif p.op == "while":
            if lang.eval(p.params[0], s) != 0:
                stack.append(p)
                stack.append(p.children[0])
        else:
            raise ValueError(p.op)
    return {s}
