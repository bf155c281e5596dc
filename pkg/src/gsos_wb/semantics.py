"""Rule application, its structural extension to terms, and operational models.

A *language* couples a behaviour instance with a one-layer rule function
``rho(op, params, args, values, embed)``: given an operator instance, the
argument states and their behaviour values, it returns the composite's
behaviour over terms.  ``embed`` turns a carrier element into a term
(``Leaf`` for abstract states, identity when the carrier already consists of
terms), which performs the term-monad flattening eagerly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Protocol, Sequence

from .dsl import GroundRule, Spec, instantiate_schemas
from .lts import LtsBehavior
from .order import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_MAX_STATES,
    OrderedBehavior,
    UnknownState,
    reachable,
    rt_close,
)
from .report import CheckReport
from .terms import (
    Leaf,
    Node,
    OpInstance,
    Term,
    enumerate_terms,
    format_term,
    parse_term,
    state_key,
    substitute,
)


class Language(Protocol):
    name: str
    behavior: OrderedBehavior
    is_positive: bool

    def instances(self) -> list[OpInstance]: ...

    def rho(self, op: str, params: tuple, args: Sequence, values: Sequence, embed: Callable) -> object: ...

    def format_term(self, t: Term) -> str: ...

    def parse_term(self, text: str) -> Term: ...

    def enumerate_terms(self, depth: int, leaves: Iterable = ()) -> list[Term]: ...


def _identity(t):
    return t


class GsosLanguage:
    """A parsed rule specification over the LTS behaviour."""

    def __init__(self, spec: Spec):
        self.spec = spec
        self.name = spec.name
        self.signature = spec.signature
        self.behavior = LtsBehavior(spec.signature.all_labels)
        self.ground_rules: list[GroundRule] = instantiate_schemas(spec)
        self.is_positive = spec.is_positive
        self._index: dict = {}
        for rule in self.ground_rules:
            self._index.setdefault((rule.op, rule.params), []).append(rule)

    def rules_for(self, op: str, params: tuple) -> list[GroundRule]:
        return self._index.get((op, tuple(params)), [])

    def instances(self) -> list[OpInstance]:
        return self.signature.instances()

    def rho(self, op, params, args, values, embed):
        out = set()
        for rule in self._index.get((op, params), ()):
            if any(any(l == c for l, _ in values[i]) for i, c in rule.negative):
                continue
            choices = [[y for l, y in values[i] if l == c] for i, c, _ in rule.positive]
            if any(not ch for ch in choices):
                continue
            base = {v: embed(a) for v, a in zip(rule.source_vars, args)}
            for combo in itertools.product(*choices):
                binding = dict(base)
                for (_, _, var), y in zip(rule.positive, combo):
                    binding[var] = embed(y)
                out.add((rule.label, substitute(rule.target, binding)))
        return frozenset(out)

    def format_term(self, t: Term) -> str:
        return format_term(t)

    def parse_term(self, text: str) -> Term:
        return parse_term(text, self.signature)

    def enumerate_terms(self, depth: int, leaves: Iterable = ()) -> list[Term]:
        return enumerate_terms(self.signature, depth, leaves)


@dataclass(frozen=True)
class OneLayerContext:
    op: str
    params: tuple
    args: tuple

    @property
    def term(self) -> Node:
        return Node(self.op, self.params, tuple(Leaf(a) for a in self.args))


def contexts(lang: Language, carrier: Sequence[Hashable]) -> list[OneLayerContext]:
    out = []
    for inst in lang.instances():
        for args in itertools.product(carrier, repeat=inst.arity):
            out.append(OneLayerContext(inst.op, inst.params, args))
    return out


def _get(f, x):
    if isinstance(f, Mapping):
        try:
            return f[x]
        except KeyError:
            raise UnknownState(x) from None
    return f(x)


_APPLY_CACHE: dict = {}
_APPLY_CACHE_LIMIT = 500_000


def apply_rules(lang: Language, ctx: OneLayerContext, f) -> object:
    """One-layer rule application; targets are terms with leaves in the carrier.

    Results are memoised per language, context and argument values, since
    the checkers evaluate the same small contexts over many tables.
    """
    values = tuple(_get(f, a) for a in ctx.args)
    key = (id(lang), ctx, values)
    hit = _APPLY_CACHE.get(key)
    if hit is not None and hit[0] is lang:
        return hit[1]
    if len(_APPLY_CACHE) >= _APPLY_CACHE_LIMIT:
        _APPLY_CACHE.clear()
    out = lang.rho(ctx.op, ctx.params, ctx.args, values, Leaf)
    _APPLY_CACHE[key] = (lang, out)
    return out


def lambda_extend(lang: Language, f, t: Term, memo: dict | None = None) -> object:
    """Structural extension of the rules to a whole term over ``f``'s carrier."""
    if memo is None:
        memo = {}
    hit = memo.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Leaf):
        value = lang.behavior.map_states(Leaf, _get(f, t.value))
    else:
        values = [lambda_extend(lang, f, c, memo) for c in t.children]
        value = lang.rho(t.op, t.params, t.children, values, _identity)
    memo[t] = value
    return value


class TermStep:
    """Open transition table ``t -> lambda_extend(f, t)`` with memoisation."""

    def __init__(self, lang: Language, f=None):
        self.lang = lang
        self.f = f if f is not None else {}
        self.memo: dict = {}

    def __call__(self, t: Term):
        return lambda_extend(self.lang, self.f, t, self.memo)


@dataclass
class OperationalModel:
    lang: Language
    roots: list
    states: list
    h: dict
    saturated: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        beh, fmt = self.lang.behavior, self.lang.format_term
        states = sorted(self.states, key=state_key)

        def triples(table):
            out = []
            for x in states:
                for obs, y in sorted(beh.observations(table[x]), key=lambda e: _obs_key(e)):
                    out.append([fmt(x), _format_obs(obs), "✓" if y is None else fmt(y)])
            return out

        doc = {
            "language": self.lang.name,
            "roots": [fmt(r) for r in self.roots],
            "states": [fmt(x) for x in states],
            "transitions": triples(self.h),
        }
        if self.saturated is not None:
            doc["saturated"] = triples(self.saturated)
        return doc


def _obs_key(e):
    obs, y = e
    return (state_key(obs), (0,) if y is None else state_key(y))


def _format_obs(obs) -> str:
    if isinstance(obs, tuple):
        return "->".join(_format_store(s) for s in obs)
    return str(obs)


def _format_store(s) -> str:
    return "(" + ",".join(map(str, s)) + ")" if isinstance(s, tuple) else str(s)


def operational_model(
    lang: Language,
    roots: Iterable[Term],
    *,
    max_states: int = DEFAULT_MAX_STATES,
    step: TermStep | None = None,
) -> OperationalModel:
    """The rule-generated coalgebra on closed terms reachable from ``roots``."""
    roots = list(roots)
    step = step or TermStep(lang)
    h = reachable(lang.behavior, step, roots, max_states)
    return OperationalModel(lang, roots, list(h), h, notes=[f"states={len(h)}"])


def saturate_model(
    model: OperationalModel,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> OperationalModel:
    """Attach the rt-closure of ``h``, expanding the state space if targets leave it."""
    lang = model.lang
    h = dict(model.h)

    def step(t):
        if t not in h:
            h[t] = lambda_extend(lang, {}, t)
        return h[t]

    star = rt_close(lang.behavior, step, model.states, max_states=max_states, max_iterations=max_iterations)
    states = list(dict.fromkeys(list(model.states) + list(star)))
    return OperationalModel(lang, model.roots, states, {x: h[x] for x in states}, star, list(model.notes))


def check_saturation_invariance(
    lang: Language,
    f: Mapping,
    roots: Iterable[Term],
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> CheckReport:
    """Compare the closures of the term-level systems induced by ``f`` and by ``f*``."""
    beh = lang.behavior
    roots = list(roots)
    report = CheckReport("saturation-invariance", mode="fragment")
    if not lang.is_positive:
        report.notes.append("specification is not positive; invariance is not expected")
    fstar = rt_close(beh, f, max_states=max_states, max_iterations=max_iterations)
    step_f, step_star = TermStep(lang, f), TermStep(lang, fstar)
    fragment = dict.fromkeys(reachable(beh, step_f, roots, max_states))
    fragment.update(dict.fromkeys(reachable(beh, step_star, roots, max_states)))
    fragment = list(fragment)
    closed_f = rt_close(beh, step_f, fragment, max_states=max_states, max_iterations=max_iterations)
    closed_star = rt_close(beh, step_star, fragment, max_states=max_states, max_iterations=max_iterations)
    terms = sorted(set(closed_f) | set(closed_star), key=state_key)
    report.cases = len(terms)
    for t in terms:
        a = closed_f[t] if t in closed_f else rt_close(beh, step_f, [t])[t]
        b = closed_star[t] if t in closed_star else rt_close(beh, step_star, [t])[t]
        if beh.equal(a, b):
            continue
        for side, extra in (("f*-only", beh.difference(b, a)), ("f-only", beh.difference(a, b))):
            if extra:
                report.fail(
                    {
                        "term": lang.format_term(t),
                        "transition": beh.format_element(extra[0], lang.format_term),
                        "side": side,
                    }
                )
                break
        break
    return report


def model_respects_rules(model: OperationalModel) -> bool:
    """The bialgebra square: ``h(op(ts)) = rho(op, ts, h)`` on every composite state."""
    lang = model.lang
    for t in model.states:
        if isinstance(t, Node):
            values = [model.h[c] if c in model.h else lambda_extend(lang, {}, c) for c in t.children]
            if lang.rho(t.op, t.params, t.children, values, _identity) != model.h[t]:
                return False
    return True


__all__ = [
    "GsosLanguage",
    "Language",
    "OneLayerContext",
    "OperationalModel",
    "TermStep",
    "apply_rules",
    "check_saturation_invariance",
    "contexts",
    "lambda_extend",
    "model_respects_rules",
    "operational_model",
    "saturate_model",
]
