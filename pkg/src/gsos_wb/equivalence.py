"""Partition refinement, weak bisimilarity and congruence-failure search.

Weak bisimilarity is strong bisimilarity of the saturated model, so both
reduce to one refinement routine over observations ``(key, successor)``.
A successor of ``None`` marks termination and is compared as a fixed atom.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .order import DEFAULT_MAX_ITERATIONS, DEFAULT_MAX_STATES, OrderedBehavior
from .semantics import Language, TermStep, operational_model, saturate_model
from .terms import Node, Term, state_key

_TERMINATED = -1


@dataclass
class Partition:
    """Blocks numbered canonically by their least member in ``state_key`` order."""

    block: dict

    @property
    def count(self) -> int:
        return len(set(self.block.values()))

    def blocks(self) -> list[list]:
        groups: dict = {}
        for x in sorted(self.block, key=state_key):
            groups.setdefault(self.block[x], []).append(x)
        return [groups[b] for b in sorted(groups)]

    def same(self, x, y) -> bool:
        return self.block[x] == self.block[y]


def _signature(beh: OrderedBehavior, v, block: Mapping) -> frozenset:
    return frozenset((obs, _TERMINATED if y is None else block[y]) for obs, y in beh.observations(v))


def partition_refine(beh: OrderedBehavior, table: Mapping) -> Partition:
    """Coarsest partition that is a strong bisimulation of a closed table."""
    states = sorted(table, key=state_key)
    block = {x: 0 for x in states}
    count = 1
    while True:
        ids: dict = {}
        new = {}
        for x in states:
            key = (block[x], _signature(beh, table[x], block))
            new[x] = ids.setdefault(key, len(ids))
        block = new
        if len(ids) == count:
            return Partition(block)
        count = len(ids)


def distinguishing_move(beh: OrderedBehavior, table: Mapping, part: Partition, x, y, fmt=str) -> dict | None:
    """A move of one state that the other cannot match up to the partition."""
    for a, b in ((x, y), (y, x)):
        other = _signature(beh, table[b], part.block)
        for obs, succ in sorted(beh.observations(table[a]), key=lambda e: (state_key(e[0]), state_key(e[1]))):
            if (obs, _TERMINATED if succ is None else part.block[succ]) not in other:
                return {
                    "state": fmt(a),
                    "observation": _fmt_obs(obs),
                    "successor": "✓" if succ is None else fmt(succ),
                    "unmatched_by": fmt(b),
                }
    return None


def _fmt_obs(obs) -> str:
    if isinstance(obs, tuple):
        return "->".join("(" + ",".join(map(str, s)) + ")" for s in obs)
    return str(obs)


@dataclass
class BisimVerdict:
    related: bool
    blocks: list
    witness: dict | None = None
    states: int = 0

    def to_dict(self) -> dict:
        return {
            "related": self.related,
            "blocks": len(self.blocks),
            "partition": self.blocks,
            "witness": self.witness,
            "states": self.states,
        }


def are_weakly_bisimilar(
    lang: Language,
    t1: Term,
    t2: Term,
    *,
    weak: bool = True,
    max_states: int = DEFAULT_MAX_STATES,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> BisimVerdict:
    """Decide (weak) bisimilarity of two closed terms on their joint reachable model."""
    model = operational_model(lang, [t1, t2], max_states=max_states)
    table = model.h
    if weak:
        table = saturate_model(model, max_states=max_states, max_iterations=max_iterations).saturated
    part = partition_refine(lang.behavior, table)
    fmt = lang.format_term
    blocks = [[fmt(x) for x in b] for b in part.blocks()]
    related = part.same(t1, t2)
    witness = None if related else distinguishing_move(lang.behavior, table, part, t1, t2, fmt)
    return BisimVerdict(related, blocks, witness, len(table))


@dataclass(frozen=True)
class CongruenceWitness:
    """Pointwise-equivalent arguments whose composites are not equivalent."""

    op: str
    params: tuple
    left_args: tuple
    right_args: tuple
    left: Node
    right: Node
    evidence: dict | None = field(default=None, compare=False, hash=False)

    def to_dict(self, fmt) -> dict:
        return {
            "operator": self.op,
            "left": fmt(self.left),
            "right": fmt(self.right),
            "arguments": [[fmt(a), fmt(b)] for a, b in zip(self.left_args, self.right_args)],
            "evidence": self.evidence,
        }


@dataclass
class CongruenceResult:
    depth: int
    terms: int
    composites: int
    classes: int
    witnesses: list

    @property
    def congruent(self) -> bool:
        return not self.witnesses

    def to_dict(self, fmt) -> dict:
        return {
            "depth": self.depth,
            "terms": self.terms,
            "composites": self.composites,
            "classes": self.classes,
            "congruent": self.congruent,
            "witnesses": [w.to_dict(fmt) for w in self.witnesses],
        }


def congruence_search(
    lang: Language,
    depth: int,
    *,
    weak: bool = True,
    leaves: Iterable[Hashable] = (),
    max_states: int = 500_000,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> CongruenceResult:
    """Search composites of depth ``<= depth`` for congruence failures.

    Arguments range over all terms of depth ``<= depth - 1``.  Composites of
    one operator instance are grouped by the equivalence classes of their
    arguments; every group spanning more than one class yields its minimal
    witness pair, ordered by total size and then printed form.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    pool = lang.enumerate_terms(depth - 1, leaves)
    composites = []
    for inst in lang.instances():
        if inst.arity == 0:
            continue
        for args in itertools.product(pool, repeat=inst.arity):
            composites.append(Node(inst.op, inst.params, args))
    step = TermStep(lang)
    model = operational_model(lang, pool + composites, max_states=max_states, step=step)
    table = model.h
    if weak:
        table = saturate_model(model, max_states=max_states, max_iterations=max_iterations).saturated
    part = partition_refine(lang.behavior, table)
    fmt = lang.format_term

    groups: dict = {}
    for c in composites:
        key = (c.op, c.params, tuple(part.block[a] for a in c.children))
        groups.setdefault(key, []).append(c)
    witnesses = []
    for members in groups.values():
        if len({part.block[c] for c in members}) < 2:
            continue
        members.sort(key=lambda c: (c.size, fmt(c)))
        first = members[0]
        other = next(c for c in members if not part.same(c, first))
        evidence = distinguishing_move(lang.behavior, table, part, first, other, fmt)
        witnesses.append(
            CongruenceWitness(first.op, first.params, first.children, other.children, first, other, evidence)
        )
    witnesses.sort(key=lambda w: (w.left.size + w.right.size, fmt(w.left), fmt(w.right)))
    return CongruenceResult(depth, len(pool), len(composites), part.count, witnesses)


__all__ = [
    "BisimVerdict",
    "CongruenceResult",
    "CongruenceWitness",
    "Partition",
    "are_weakly_bisimilar",
    "congruence_search",
    "distinguishing_move",
    "partition_refine",
]
