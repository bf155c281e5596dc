"""Checkers for the three compositionality criteria over an abstract carrier.

Every checker quantifies over transition tables ``f : X -> T X`` on a small
carrier ``X`` and over all one-layer contexts ``op(x1, ..., xn)`` with
``xi`` in ``X``:

* monotonicity: ``f <= g`` implies ``rho(ctx, f) <= rho(ctx, g)``.  In a
  finite powerset lattice it suffices to check covers ``g = f + one atom``.
* unitality: ``rho(ctx, eta v f)`` is bounded by ``rho(ctx, f) v eta(ctx)``
  (strong form) or by the closure of the term-level step at ``ctx``.
* observability: ``rho(ctx, f <> f)`` is bounded by that same closure.

Small table spaces are enumerated; larger ones are sampled from a seeded
generator, and a sampled run without counterexamples is reported as
inconclusive.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

from ..lts import LtsBehavior
from ..order import FuelExhausted, GsosError, OrderedBehavior, kleisli_power, reachable, rt_close
from ..report import FAIL, INCONCLUSIVE, PASS, CheckReport
from ..semantics import Language, OneLayerContext, TermStep, apply_rules, contexts
from ..terms import Term
from .library import MONOTONICITY, OBSERVABILITY, UNITALITY, TargetedCase, targeted_cases

STRONG, ORIGINAL = "strong", "original"
EXHAUSTIVE, SAMPLED, AUTO = "exhaustive", "sampled", "auto"


class BudgetExceeded(GsosError):
    """Exhaustive mode was requested for a table space above the budget."""


@dataclass
class CriteriaConfig:
    carrier_size: int = 2
    labels: tuple = ("tau", "a", "abar")
    mode: str = AUTO
    samples: int = 1000
    seed: int = 0
    budget: int = 4096
    form: str = STRONG
    max_states: int = 2000
    max_iterations: int = 1000
    targeted: bool = True
    max_witnesses: int = 5
    covers_per_table: int = 4  # sampled mode only

    def __post_init__(self):
        if self.mode not in (AUTO, EXHAUSTIVE, SAMPLED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.form not in (STRONG, ORIGINAL):
            raise ValueError(f"unknown unitality form {self.form!r}")
        if self.carrier_size < 1:
            raise ValueError("carrier size must be positive")


def carrier_states(n: int) -> list[str]:
    names = ["x", "y", "z", "u"]
    return names[:n] if n <= len(names) else [f"x{i}" for i in range(n)]


def table_behavior(lang: Language, cfg: CriteriaConfig) -> OrderedBehavior:
    """The instance used to enumerate or sample tables (labels restricted for LTS)."""
    beh = lang.behavior
    if isinstance(beh, LtsBehavior):
        declared = set(beh.labels)
        return LtsBehavior([l for l in cfg.labels if l in declared])
    return beh


def table_space_size(beh: OrderedBehavior, n: int) -> int | None:
    try:
        return beh.value_space_size(n) ** n
    except NotImplementedError:
        return None


def format_table(beh: OrderedBehavior, f: dict, fmt=str) -> dict:
    def show(y):
        return fmt(y) if isinstance(y, Term) else str(y)

    return {str(x): beh.format_value(f[x], show) for x in sorted(f, key=str)}


class _Run:
    """Shared bookkeeping: table source, counters and witness collection."""

    def __init__(self, lang: Language, cfg: CriteriaConfig, criterion: str):
        self.lang, self.cfg = lang, cfg
        self.beh = lang.behavior
        self.tbeh = table_behavior(lang, cfg)
        self.carrier = carrier_states(cfg.carrier_size)
        size = table_space_size(self.tbeh, len(self.carrier))
        fits = size is not None and size <= cfg.budget and lang.name != "while"
        if cfg.mode == EXHAUSTIVE and not fits:
            raise BudgetExceeded(
                f"table space {'unknown' if size is None else size} exceeds budget {cfg.budget}"
            )
        self.mode = EXHAUSTIVE if (cfg.mode == EXHAUSTIVE or (cfg.mode == AUTO and fits)) else SAMPLED
        self.report = CheckReport(criterion, mode=self.mode, seed=cfg.seed if self.mode == SAMPLED else None)
        self.report.details = {"carrier": list(self.carrier), "space": size}
        self.rng = random.Random(cfg.seed)
        self.fuel_failures = 0
        self.targeted_run = 0

    @property
    def full(self) -> bool:
        return len(self.report.witnesses) >= self.cfg.max_witnesses

    def tables(self) -> Iterator[dict]:
        if self.mode == EXHAUSTIVE:
            yield from self.tbeh.enumerate_tables(self.carrier)
        else:
            for _ in range(self.cfg.samples):
                yield self.tbeh.sample_table(self.carrier, self.rng)

    def contexts(self, carrier=None) -> list[OneLayerContext]:
        return contexts(self.lang, carrier or self.carrier)

    def targeted(self) -> list[TargetedCase]:
        return targeted_cases(self.lang, self.report.criterion) if self.cfg.targeted else []

    def witness(self, f: dict, ctx: OneLayerContext, extra, side: str, source: str, **more) -> None:
        fmt = self.lang.format_term
        w = {
            "table": format_table(self.beh, f, fmt),
            "context": fmt(ctx.term),
            "transition": self.beh.format_element(extra, fmt),
            "side": side,
            "source": source,
        }
        w.update(more)
        self.report.fail(w)

    def finish(self) -> CheckReport:
        r = self.report
        if self.fuel_failures:
            r.notes.append(f"fuel exhausted on {self.fuel_failures} case(s)")
        if r.verdict != FAIL:
            r.verdict = PASS if (self.mode == EXHAUSTIVE and not self.fuel_failures) else INCONCLUSIVE
        if self.targeted_run:
            r.details["targeted"] = self.targeted_run
        return r


def _contexts_of(case: TargetedCase) -> list[OneLayerContext]:
    return [OneLayerContext(op, tuple(params), tuple(args)) for op, params, args in case.contexts]


# monotonicity


def check_monotonicity(lang: Language, cfg: CriteriaConfig | None = None) -> CheckReport:
    cfg = cfg or CriteriaConfig()
    run = _Run(lang, cfg, MONOTONICITY)
    if not lang.is_positive:
        run.report.notes.append("syntactic phase: specification has negative premises")
    else:
        run.report.notes.append("syntactic phase: specification is positive")

    for case in run.targeted():
        run.targeted_run += 1
        for ctx in _contexts_of(case):
            _mono_pair(run, case.table, case.upper, ctx, f"targeted:{case.name}")

    ctxs = run.contexts()
    by_state = {x: [c for c in ctxs if x in c.args] for x in run.carrier}
    atoms = run.tbeh.atoms(run.carrier)
    for f in run.tables():
        if run.full:
            break
        run.report.cases += 1
        base = {c: apply_rules(lang, c, f) for c in ctxs}
        for x in run.carrier:
            missing = [a for a in atoms if a not in f[x]]
            if run.mode == SAMPLED:
                missing = run.rng.sample(missing, min(cfg.covers_per_table, len(missing)))
            for atom in missing:
                g = dict(f)
                g[x] = f[x] | {atom}
                for c in by_state[x]:
                    lower, upper = base[c], apply_rules(lang, c, g)
                    if not run.beh.leq(lower, upper):
                        _mono_witness(run, f, g, c, lower, upper, "enumerated" if run.mode == EXHAUSTIVE else "sampled")
                        if run.full:
                            return run.finish()
    return run.finish()


def _mono_pair(run: _Run, f, g, ctx, source) -> None:
    lower, upper = apply_rules(run.lang, ctx, f), apply_rules(run.lang, ctx, g)
    if not run.beh.leq(lower, upper):
        _mono_witness(run, f, g, ctx, lower, upper, source)


def _mono_witness(run, f, g, ctx, lower, upper, source) -> None:
    extra = run.beh.difference(lower, upper)[0]
    run.witness(
        f, ctx, extra, "smaller-only", source, table_upper=format_table(run.beh, g, run.lang.format_term)
    )


# unitality and observability


def _check_table(run: _Run, f: dict, ctxs, source: str, kind: str) -> None:
    lang, beh = run.lang, run.beh
    if kind == UNITALITY:
        arg = {x: beh.join(beh.unit(x), v) for x, v in f.items()}
        strong = run.cfg.form == STRONG
    else:
        arg = beh.compose_tables(f, f)
        strong = False
    # right <= closure, and the closure contains one step and the unit
    pending = []
    for ctx in ctxs:
        left = apply_rules(lang, ctx, arg)
        quick = beh.join(apply_rules(lang, ctx, f), beh.unit(ctx.term))
        if beh.leq(left, quick):
            continue
        if strong:
            run.witness(f, ctx, beh.difference(left, quick)[0], "left-only", source)
        else:
            pending.append((ctx, left))
        if run.full:
            return
    if not pending:
        return
    step = TermStep(lang, f)
    try:
        closed = rt_close(
            beh,
            step,
            [ctx.term for ctx, _ in pending],
            max_states=run.cfg.max_states,
            max_iterations=run.cfg.max_iterations,
        )
    except FuelExhausted:
        run.fuel_failures += 1
        return
    for ctx, left in pending:
        extra = beh.difference(left, closed[ctx.term])
        if extra:
            run.witness(f, ctx, extra[0], "left-only", source)
            if run.full:
                return


def _check_criterion(lang: Language, cfg: CriteriaConfig, kind: str) -> CheckReport:
    run = _Run(lang, cfg, kind)
    if kind == UNITALITY:
        run.report.details["form"] = cfg.form
    for case in run.targeted():
        run.targeted_run += 1
        _check_table(run, case.table, _contexts_of(case), f"targeted:{case.name}", kind)
    ctxs = run.contexts()
    source = "enumerated" if run.mode == EXHAUSTIVE else "sampled"
    for f in run.tables():
        if run.full:
            break
        run.report.cases += 1
        _check_table(run, f, ctxs, source, kind)
    return run.finish()


def check_unitality(lang: Language, cfg: CriteriaConfig | None = None) -> CheckReport:
    return _check_criterion(lang, cfg or CriteriaConfig(), UNITALITY)


def check_observability(lang: Language, cfg: CriteriaConfig | None = None) -> CheckReport:
    return _check_criterion(lang, cfg or CriteriaConfig(), OBSERVABILITY)


def check_all(lang: Language, cfg: CriteriaConfig | None = None) -> list[CheckReport]:
    cfg = cfg or CriteriaConfig()
    return [check_monotonicity(lang, cfg), check_unitality(lang, cfg), check_observability(lang, cfg)]


def derivation_length(lang: Language, f: dict, term: Term, element, max_n: int = 50) -> int | None:
    """Least ``n`` with ``element`` in ``(eta v step)^n`` at ``term``, or ``None``."""
    step = TermStep(lang, f)
    fragment = reachable(lang.behavior, step, [term])
    for n in range(max_n + 1):
        if element in kleisli_power(lang.behavior, fragment, n)[term]:
            return n
    return None


def leaf_term(lang: Language, op: str, *args, params: tuple = ()) -> Term:
    """The embedded one-layer context ``op(args)`` over carrier leaves."""
    return OneLayerContext(op, params, tuple(args)).term


__all__ = [
    "AUTO",
    "EXHAUSTIVE",
    "ORIGINAL",
    "SAMPLED",
    "STRONG",
    "BudgetExceeded",
    "CriteriaConfig",
    "carrier_states",
    "check_all",
    "check_monotonicity",
    "check_observability",
    "check_unitality",
    "derivation_length",
    "format_table",
    "leaf_term",
    "table_behavior",
    "table_space_size",
]
