"""The ``.gsos`` rule-specification language.

A specification declares labels, coaction pairs and operators, followed by
GSOS rules::

    spec spc
    pairs a ~ abar;
    op nil/0;  op pre[L]/1;  op sum/2;  op par/2;
    rule prefix [D:any]: ==> D.x -D-> x;
    rule sum1 [D:any]: x -D-> x1 ==> x + y -D-> x1;
    rule neg: x -a-/> ==> [x] -b-> 0;

Rules may bind label metavariables ranging over ``any``, ``visible`` or
``tau``; ``~M`` is the coaction of a visible metavariable.  ``tau`` is always
declared.  The trailing ``;`` of a rule is optional and ``#`` starts a
comment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .report import CheckReport
from .terms import (
    TAU,
    Leaf,
    Node,
    ParseError,
    Signature,
    SignatureError,
    Term,
    TermParser,
    TokenStream,
    format_term,
    leaves,
    map_leaves,
)

RANGES = ("any", "visible", "tau")


class DuplicateOperator(ParseError):
    pass


class UndeclaredLabel(ParseError):
    pass


class CoactionOfTau(ParseError):
    pass


@dataclass(frozen=True)
class LabelExpr:
    kind: str  # "const" | "meta" | "co"
    name: str

    def __str__(self) -> str:
        return "~" + self.name if self.kind == "co" else self.name

    def resolve(self, binding: dict, sig: Signature) -> str | None:
        if self.kind == "const":
            return self.name
        value = binding[self.name]
        if self.kind == "meta":
            return value
        return sig.pairs.get(value)


@dataclass(frozen=True)
class Premise:
    var: str
    label: LabelExpr
    target: str | None = None  # None for a negative premise

    @property
    def positive(self) -> bool:
        return self.target is not None


@dataclass
class RuleSchema:
    name: str
    source: Term
    premises: tuple
    label: LabelExpr
    target: Term
    metavars: tuple = ()  # ((name, range), ...)

    @property
    def op(self) -> str:
        return self.source.op if isinstance(self.source, Node) else ""

    @property
    def source_vars(self) -> tuple:
        if isinstance(self.source, Node):
            return tuple(c.value if isinstance(c, Leaf) else None for c in self.source.children)
        return ()

    @property
    def positive_premises(self) -> tuple:
        return tuple(p for p in self.premises if p.positive)

    @property
    def negative_premises(self) -> tuple:
        return tuple(p for p in self.premises if not p.positive)


@dataclass(frozen=True)
class GroundRule:
    """A rule with every label fixed; premise variables resolved to argument indices."""

    name: str
    schema: str
    op: str
    params: tuple
    source_vars: tuple
    positive: tuple  # ((arg index, label, target var), ...)
    negative: tuple  # ((arg index, label), ...)
    label: str
    target: Term

    @property
    def premises(self) -> list:
        out = [(self.source_vars[i], l, y) for i, l, y in self.positive]
        out += [(self.source_vars[i], l, None) for i, l in self.negative]
        return out


@dataclass
class Spec:
    name: str
    signature: Signature
    rules: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def is_positive(self) -> bool:
        return all(p.positive for r in self.rules for p in r.premises)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Spec)
            and self.name == other.name
            and self.signature == other.signature
            and self.rules == other.rules
        )


# ---------------------------------------------------------------------------
# parsing


class _SpecParser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)
        self.sig = Signature()
        self.name = "unnamed"
        self.rules: list = []
        self.notes: list = []

    def run(self) -> Spec:
        ts = self.ts
        if ts.accept("spec"):
            self.name = self._dashed_name()
        while ts.peek.kind != "eof":
            tok = ts.peek
            if ts.accept("labels"):
                for name in self._ident_list():
                    self._check_label_name(name)
                    self.sig.add_label(name)
                ts.expect(";")
            elif ts.accept("pairs"):
                self._pairs()
                ts.expect(";")
            elif ts.accept("op"):
                self._op()
                ts.expect(";")
            elif ts.accept("rule"):
                self.rules.append(self._rule())
                ts.accept(";")
            else:
                ts.error(f"expected a declaration, found {tok.text!r}")
        return Spec(self.name, self.sig, self.rules, self.notes)

    def _dashed_name(self) -> str:
        parts = [self.ts.ident().text]
        while self.ts.at("-") and self.ts.peek_at(1).kind in ("ident", "num"):
            self.ts.next()
            parts.append(self.ts.next().text)
        return "-".join(parts)

    def _ident_list(self) -> list:
        names = [self.ts.ident().text]
        while self.ts.accept(","):
            names.append(self.ts.ident().text)
        return names

    def _check_label_name(self, name: str) -> None:
        if name in self.sig.operators:
            self.ts.error(f"label {name!r} clashes with an operator")

    def _pairs(self) -> None:
        ts = self.ts
        while True:
            tok = ts.peek
            a = ts.ident().text
            ts.expect("~")
            b = ts.ident().text
            if TAU in (a, b):
                ts.error("tau has no coaction", CoactionOfTau, tok)
            try:
                self.sig.add_pair(a, b)
            except SignatureError as exc:
                ts.error(str(exc), ParseError, tok)
            if not ts.accept(","):
                return

    def _op(self) -> None:
        ts = self.ts
        tok = ts.peek
        if tok.kind == "num" and tok.text == "0":
            ts.next()
            name = "nil"
        else:
            name = ts.ident().text
        nparams = 0
        if ts.accept("["):
            nparams = len(self._ident_list())
            ts.expect("]")
        ts.expect("/")
        arity_tok = ts.next()
        if arity_tok.kind != "num":
            ts.error("expected arity", tok=arity_tok)
        if name in self.sig.operators:
            ts.error(f"duplicate operator {name!r}", DuplicateOperator, tok)
        self.sig.add_operator(name, int(arity_tok.text), nparams)

    def _rule(self) -> RuleSchema:
        ts = self.ts
        name = ts.ident().text
        metavars: dict = {}
        if ts.accept("["):
            while True:
                tok = ts.peek
                mv = ts.ident().text
                ts.expect(":")
                rng = ts.ident().text
                if rng not in RANGES:
                    ts.error(f"unknown metavariable range {rng!r}", tok=tok)
                if self.sig.is_label(mv) or mv in metavars:
                    ts.error(f"metavariable {mv!r} clashes with a label or metavariable", tok=tok)
                metavars[mv] = rng
                if not ts.accept(","):
                    break
            ts.expect("]")
        ts.expect(":")
        self._metavars = metavars
        premises = []
        if not ts.at("==>"):
            premises.append(self._premise())
            while ts.accept(","):
                premises.append(self._premise())
        ts.expect("==>")
        terms = TermParser(self.sig, self._term_label)
        source = terms.parse(ts)
        ts.expect("-")
        label = self._label_expr()
        ts.expect("->")
        target = terms.parse(ts)
        return RuleSchema(name, source, tuple(premises), label, target, tuple(metavars.items()))

    def _premise(self) -> Premise:
        ts = self.ts
        var = ts.ident().text
        ts.expect("-")
        label = self._label_expr()
        if ts.accept("-/>"):
            return Premise(var, label, None)
        ts.expect("->")
        return Premise(var, label, ts.ident().text)

    def _label_expr(self) -> LabelExpr:
        ts = self.ts
        tok = ts.peek
        co = ts.accept("~")
        name = ts.ident().text
        if name in self._metavars:
            if co:
                if self._metavars[name] != "visible":
                    ts.error(f"coaction of {name!r}, which may be tau", CoactionOfTau, tok)
                return LabelExpr("co", name)
            return LabelExpr("meta", name)
        if not self.sig.is_label(name):
            ts.error(f"undeclared label {name!r}", UndeclaredLabel, tok)
        if co:
            if name == TAU:
                ts.error("tau has no coaction", CoactionOfTau, tok)
            if name not in self.sig.pairs:
                ts.error(f"label {name!r} has no coaction", UndeclaredLabel, tok)
            return LabelExpr("const", self.sig.pairs[name])
        return LabelExpr("const", name)

    def _term_label(self, ts: TokenStream):
        tok, nxt = ts.peek, ts.peek_at(1)
        if tok.text == "~" or (tok.kind == "ident" and nxt.text == "."):
            return self._label_expr()
        return None


def parse_spec(text: str) -> Spec:
    return _SpecParser(text).run()


# ---------------------------------------------------------------------------
# printing


def format_label_expr(e: LabelExpr) -> str:
    return str(e)


def format_rule(rule: RuleSchema) -> str:
    head = f"rule {rule.name}"
    if rule.metavars:
        head += " [" + ", ".join(f"{m}:{r}" for m, r in rule.metavars) + "]"
    prem = []
    for p in rule.premises:
        if p.positive:
            prem.append(f"{p.var} -{p.label}-> {p.target}")
        else:
            prem.append(f"{p.var} -{p.label}-/>")
    body = ", ".join(prem)
    concl = f"{format_term(rule.source)} -{rule.label}-> {format_term(rule.target)}"
    return f"{head}: {body + ' ' if body else ''}==> {concl};"


def format_spec(spec: Spec) -> str:
    sig = spec.signature
    lines = [f"spec {spec.name}"]
    paired = [(a, b) for a, b in sig.pairs.items() if a < b]
    unpaired = [l for l in sig.labels if l not in sig.pairs]
    if unpaired:
        lines.append("labels " + ", ".join(unpaired) + ";")
    if paired:
        lines.append("pairs " + ", ".join(f"{a} ~ {b}" for a, b in paired) + ";")
    for decl in sig.operators.values():
        params = ""
        if decl.label_params:
            params = "[" + ", ".join(f"L{i}" for i in range(decl.label_params)) + "]"
        lines.append(f"op {decl.name}{params}/{decl.arity};")
    lines += [format_rule(r) for r in spec.rules]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation and instantiation


def validate_gsos(spec: Spec) -> CheckReport:
    """Check the GSOS shape of every rule; violations become report entries."""
    report = CheckReport("gsos", mode="syntactic")
    for rule in spec.rules:
        report.cases += 1

        def bad(kind: str, reason: str) -> None:
            report.fail({"rule": rule.name, "violation": kind, "reason": reason})

        src = rule.source
        if not isinstance(src, Node) or src.op not in spec.signature.operators:
            bad("UndeclaredOperator", "source is not a declared operator")
            continue
        svars = rule.source_vars
        if any(v is None for v in svars):
            bad("NonVariableSource", "source arguments must be variables")
            continue
        if len(set(svars)) != len(svars):
            bad("NonLinearSource", f"source variables {svars} are not distinct")
        targets = [p.target for p in rule.premises if p.positive]
        for p in rule.premises:
            if p.var not in svars:
                bad("PremiseOnNonSource", f"premise tests {p.var!r}, not a source variable")
        if len(set(targets)) != len(targets):
            bad("DuplicatePremiseTarget", "premise targets must be distinct")
        for y in targets:
            if y in svars:
                bad("PremiseTargetClash", f"premise target {y!r} is also a source variable")
        bound = set(svars) | set(targets)
        for v in sorted(set(leaves(rule.target)) - bound):
            bad("UnboundTargetVar", f"target uses unbound variable {v!r}")
    return report


def metavar_range(rng: str, spec: Spec) -> list:
    sig = spec.signature
    if rng == "any":
        return sig.all_labels
    if rng == "visible":
        return sig.visible_labels
    return [TAU]


def instantiate_schemas(spec: Spec) -> list[GroundRule]:
    """Expand label metavariables; bindings whose coaction is undeclared are dropped."""
    sig = spec.signature
    out = []
    for rule in spec.rules:
        names = [m for m, _ in rule.metavars]
        ranges = [metavar_range(r, spec) for _, r in rule.metavars]
        for values in itertools.product(*ranges):
            binding = dict(zip(names, values))
            ground = _ground(rule, binding, sig)
            if ground is not None:
                out.append(ground)
    return out


def _ground(rule: RuleSchema, binding: dict, sig: Signature) -> GroundRule | None:
    def lab(e: LabelExpr):
        return e.resolve(binding, sig)

    labels = [lab(p.label) for p in rule.premises] + [lab(rule.label)]
    params = tuple(lab(e) if isinstance(e, LabelExpr) else e for e in rule.source.params)
    target = _ground_term(rule.target, lab)
    if None in labels or None in params or target is None:
        return None
    svars = rule.source_vars
    index = {v: i for i, v in enumerate(svars)}
    positive = tuple((index[p.var], lab(p.label), p.target) for p in rule.premises if p.positive)
    negative = tuple((index[p.var], lab(p.label)) for p in rule.premises if not p.positive)
    name = rule.name
    if rule.metavars:
        name += "[" + ",".join(binding[m] for m, _ in rule.metavars) + "]"
    return GroundRule(name, rule.name, rule.op, params, svars, positive, negative, lab(rule.label), target)


def _ground_term(t: Term, lab) -> Term | None:
    if isinstance(t, Leaf):
        return t
    params = []
    for p in t.params:
        v = lab(p) if isinstance(p, LabelExpr) else p
        if v is None:
            return None
        params.append(v)
    children = []
    for c in t.children:
        g = _ground_term(c, lab)
        if g is None:
            return None
        children.append(g)
    return Node(t.op, tuple(params), tuple(children))


__all__ = [
    "CoactionOfTau",
    "DuplicateOperator",
    "GroundRule",
    "LabelExpr",
    "Premise",
    "RuleSchema",
    "Spec",
    "UndeclaredLabel",
    "format_spec",
    "instantiate_schemas",
    "map_leaves",
    "parse_spec",
    "validate_gsos",
]
