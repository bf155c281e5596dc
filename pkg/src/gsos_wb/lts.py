"""The LTS behaviour monad ``P_f(labels x -)`` with tau-cancelling composition.

Values are frozensets of ``(label, state)`` pairs.  The unit is a silent
self-step.  Composing two steps keeps the visible label of either step when
the other is ``tau``, and drops the pair when both are visible, so composite
steps never carry two visible labels.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterator

from .order import OrderedBehavior, Table, UnknownState
from .terms import TAU, label_key, state_key


def compose_labels(first: str, second: str) -> str | None:
    if first == TAU:
        return second
    if second == TAU:
        return first
    return None


class LtsBehavior(OrderedBehavior):
    name = "lts"

    def __init__(self, labels: list | tuple = (TAU,)):
        # labels only bound random/enumerated values; composition accepts any label
        self.labels = sorted(set(labels) | {TAU}, key=label_key)

    def unit(self, x):
        return frozenset({(TAU, x)})

    def compose(self, g: Table, v: frozenset) -> frozenset:
        out = set()
        for first, y in v:
            try:
                nxt = g[y]
            except KeyError:
                raise UnknownState(y) from None
            if first == TAU:
                out.update(nxt)
            else:
                for second, z in nxt:
                    if second == TAU:
                        out.add((first, z))
        return frozenset(out)

    def join(self, v, w):
        return v | w

    def leq(self, v, w) -> bool:
        return v <= w

    @property
    def bottom(self):
        return frozenset()

    def support(self, v):
        return {y for _, y in v}

    def map_states(self, r: Callable, v):
        return frozenset((l, r(y)) for l, y in v)

    def observations(self, v) -> Iterator:
        return iter(v)

    def difference(self, v, w) -> list:
        return sorted(v - w, key=self.element_key)

    def element_key(self, e) -> tuple:
        return (label_key(e[0]), state_key(e[1]))

    def atoms(self, states: list) -> list:
        return [(l, x) for l in self.labels for x in states]

    def random_value(self, states: list, rng: random.Random, density: float = 0.3):
        return frozenset(
            (l, x) for l in self.labels for x in states if rng.random() < density
        )

    def enumerate_values(self, states: list) -> Iterator[frozenset]:
        pairs = self.atoms(states)
        for bits in itertools.product((False, True), repeat=len(pairs)):
            yield frozenset(p for p, b in zip(pairs, bits) if b)

    def value_space_size(self, n_states: int) -> int:
        return 2 ** (len(self.labels) * n_states)

    def format_element(self, e, fmt: Callable = str) -> str:
        return f"({e[0]},{fmt(e[1])})"

    def format_value(self, v, fmt: Callable = str) -> str:
        if not v:
            return "{}"
        items = sorted(v, key=self.element_key)
        return "{ " + ", ".join(self.format_element(e, fmt) for e in items) + " }"

