"""Ordered behaviour monads and the reflexive-transitive closure engine.

A behaviour instance bundles the Kleisli structure of a monad ``T`` whose
Kleisli category is order-enriched: a unit, Kleisli extension, a partial
order with binary joins and a bottom element.  Transition tables are plain
mappings ``state -> value``; an *open* table is any callable and is explored
lazily from a set of roots.
"""

from __future__ import annotations

import abc
import random
from collections import deque
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Union

State = Hashable
Value = Any
Table = Mapping[State, Value]
Step = Union[Table, Callable[[State], Value]]

DEFAULT_MAX_STATES = 10_000
DEFAULT_MAX_ITERATIONS = 1_000


class GsosError(Exception):
    """Base class for all errors raised by this package."""


class FuelExhausted(GsosError):
    """A fixpoint computation did not stabilise within its budget."""


class UnknownState(GsosError, KeyError):
    """A value refers to a state the supplied table does not define."""

    def __str__(self) -> str:
        return f"unknown state {self.args[0]!r}"


class OrderedBehavior(abc.ABC):
    """Kleisli structure of an order-enriched behaviour monad."""

    name = "abstract"

    @abc.abstractmethod
    def unit(self, x: State) -> Value:
        """The Kleisli identity at ``x``."""

    @abc.abstractmethod
    def compose(self, g: Table, v: Value) -> Value:
        """Run ``g`` after ``v``: ``mu . T g`` applied to ``v``."""

    @abc.abstractmethod
    def join(self, v: Value, w: Value) -> Value: ...

    @abc.abstractmethod
    def leq(self, v: Value, w: Value) -> bool: ...

    @property
    @abc.abstractmethod
    def bottom(self) -> Value: ...

    @abc.abstractmethod
    def support(self, v: Value) -> Iterable[State]:
        """States occurring inside ``v`` (``Done`` markers excluded)."""

    @abc.abstractmethod
    def map_states(self, r: Callable[[State], State], v: Value) -> Value:
        """Functor action ``T r``."""

    @abc.abstractmethod
    def observations(self, v: Value) -> Iterator[tuple[Hashable, State | None]]:
        """Yield ``(observable, successor)`` pairs; successor ``None`` marks termination."""

    @abc.abstractmethod
    def difference(self, v: Value, w: Value) -> list:
        """Elements of ``v`` not below ``w``, for witnesses."""

    @abc.abstractmethod
    def random_value(self, states: list, rng: random.Random) -> Value: ...

    @abc.abstractmethod
    def enumerate_values(self, states: list) -> Iterator[Value]: ...

    @abc.abstractmethod
    def format_value(self, v: Value, fmt: Callable[[State], str] = str) -> str: ...

    @abc.abstractmethod
    def format_element(self, e: Any, fmt: Callable[[State], str] = str) -> str: ...

    def equal(self, v: Value, w: Value) -> bool:
        return v == w

    def join_all(self, values: Iterable[Value]) -> Value:
        out = self.bottom
        for v in values:
            out = self.join(out, v)
        return out

    def atoms(self, states: list) -> list:
        """Single-element values over ``states``, for set-valued instances."""
        raise NotImplementedError

    def value_space_size(self, n_states: int) -> int:
        """Number of distinct values over ``n_states`` states, if finite and known."""
        raise NotImplementedError

    # tables ---------------------------------------------------------------

    def unit_table(self, states: Iterable[State]) -> dict:
        return {x: self.unit(x) for x in states}

    def compose_tables(self, g: Table, f: Table) -> dict:
        """Kleisli composite ``g <> f`` (``f`` first)."""
        return {x: self.compose(g, v) for x, v in f.items()}

    def join_tables(self, f: Table, g: Table) -> dict:
        return {x: self.join(f[x], g[x]) for x in f}

    def leq_tables(self, f: Table, g: Table) -> bool:
        return all(self.leq(f[x], g[x]) for x in f)

    def sample_table(self, states: list, rng: random.Random) -> dict:
        return {x: self.random_value(states, rng) for x in states}

    def enumerate_tables(self, states: list) -> Iterator[dict]:
        values = list(self.enumerate_values(states))

        def go(i: int, acc: dict) -> Iterator[dict]:
            if i == len(states):
                yield dict(acc)
                return
            for v in values:
                acc[states[i]] = v
                yield from go(i + 1, acc)
            acc.pop(states[i], None)

        yield from go(0, {})


def check_closed(beh: OrderedBehavior, f: Table) -> None:
    for v in f.values():
        for y in beh.support(v):
            if y not in f:
                raise UnknownState(y)


def kleisli_power(beh: OrderedBehavior, f: Table, n: int) -> dict:
    """``(id v f)^n`` for a closed table; ``n = 0`` gives the unit table."""
    if n < 0:
        raise ValueError("n must be non-negative")
    check_closed(beh, f)
    step = {x: beh.join(beh.unit(x), v) for x, v in f.items()}
    power = beh.unit_table(f)
    for _ in range(n):
        power = {x: beh.compose(power, step[x]) for x in f}
    return power


def reachable(
    beh: OrderedBehavior,
    f: Step,
    roots: Iterable[State],
    max_states: int = DEFAULT_MAX_STATES,
) -> dict:
    """Explore ``f`` breadth-first from ``roots``; returns the visited sub-table in BFS order."""
    lookup = _lookup(f)
    values: dict = {}
    queue = deque(roots)
    while queue:
        x = queue.popleft()
        if x in values:
            continue
        if len(values) >= max_states:
            raise FuelExhausted(f"more than {max_states} reachable states")
        v = lookup(x)
        values[x] = v
        for y in beh.support(v):
            if y not in values:
                queue.append(y)
    return values


def rt_close(
    beh: OrderedBehavior,
    f: Step,
    roots: Iterable[State] | None = None,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> dict:
    """Free monad ``f*`` on the states reachable from ``roots``.

    Computes the least fixpoint of ``S -> id v (S <> f)`` by chaotic
    iteration from the unit table; a state is re-evaluated whenever one of
    its successors grows.  ``max_iterations`` bounds the number of
    re-evaluations per state.
    """
    if roots is None:
        if not isinstance(f, Mapping):
            raise ValueError("roots are required for an open table")
        roots = list(f)
    values = reachable(beh, f, roots, max_states)
    order = list(values)
    preds: dict = {x: set() for x in order}
    for x in order:
        for y in beh.support(values[x]):
            preds[y].add(x)

    closure = {x: beh.unit(x) for x in order}
    pending = deque(reversed(order))
    queued = set(order)
    budget = max_iterations * max(1, len(order))
    while pending:
        budget -= 1
        if budget < 0:
            raise FuelExhausted("rt-closure chain did not stabilise")
        x = pending.popleft()
        queued.discard(x)
        new = beh.join(beh.unit(x), beh.compose(closure, values[x]))
        if not beh.equal(new, closure[x]):
            closure[x] = new
            for p in preds[x]:
                if p not in queued:
                    queued.add(p)
                    pending.append(p)
    return closure


def _lookup(f: Step) -> Callable[[State], Value]:
    if isinstance(f, Mapping):
        def get(x: State) -> Value:
            try:
                return f[x]
            except KeyError:
                raise UnknownState(x) from None
        return get
    return f
