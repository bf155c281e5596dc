"""Command-line front end: ``gsos-wb <command> [options]``.

Exit codes: 0 when the check passes (or the terms are related), 1 when a
violation is found (or the terms are unrelated), 2 on usage or runtime
errors.  ``--json`` prints exactly one JSON document on standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .analysis.criteria import CriteriaConfig, check_monotonicity, check_observability, check_unitality
from .analysis.lax import lax_check
from .analysis.library import targeted_pairs
from .analysis.wbcool import check_simply_wb_cool, violation_line
from .corpus import builtin_names, builtin_text
from .dsl import format_spec, instantiate_schemas, parse_spec, validate_gsos
from .equivalence import are_weakly_bisimilar, congruence_search
from .order import GsosError
from .report import CheckReport
from .semantics import GsosLanguage, operational_model, saturate_model
from .terms import Node
from .while_lang import WhileLanguage

OK, VIOLATION, ERROR = 0, 1, 2

CHECKERS = {
    "monotonicity": check_monotonicity,
    "unitality": check_unitality,
    "observability": check_observability,
}


class UsageError(Exception):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


# loading


def load_language(args):
    if getattr(args, "lang", "gsos") == "while":
        if args.builtin or args.spec:
            raise UsageError("--lang while does not take --builtin or --spec")
        variables = [v.strip() for v in args.vars.split(",") if v.strip()]
        return WhileLanguage(variables, args.mod), None
    if bool(args.builtin) == bool(args.spec):
        raise UsageError("exactly one of --builtin NAME or --spec FILE is required")
    if args.builtin:
        try:
            text = builtin_text(args.builtin)
        except KeyError:
            raise UsageError(f"unknown builtin {args.builtin!r}; choose from {', '.join(builtin_names())}") from None
    else:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {args.spec}: {e.strerror}") from None
    spec = parse_spec(text)
    report = validate_gsos(spec)
    if report.failed:
        lines = [f"{w['rule']}: {w['violation']}: {w['reason']}" for w in report.witnesses]
        raise GsosError("not a GSOS specification:\n  " + "\n  ".join(lines))
    return GsosLanguage(spec), spec


def _config(args) -> CriteriaConfig:
    labels = tuple(l.strip() for l in args.labels.split(",") if l.strip())
    return CriteriaConfig(
        carrier_size=args.carrier,
        labels=labels,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        budget=args.budget,
        form=args.form,
        max_iterations=args.fuel,
        max_states=args.max_states,
        targeted=not args.no_targeted,
        max_witnesses=args.max_witnesses,
    )


# commands


def cmd_lint(args, out) -> int:
    lang, spec = load_language(args)
    if spec is None:
        raise UsageError("lint applies to rule specifications, not --lang while")
    report = check_simply_wb_cool(spec)
    if args.json:
        out.write(_dump(report.to_dict()) + "\n")
    else:
        if report.passed:
            out.write(f"{spec.name}: simply WB cool\n")
        for w in report.witnesses:
            out.write(violation_line(w) + "\n")
    return VIOLATION if report.failed else OK


def _report_text(report: CheckReport) -> str:
    lines = [report.summary()]
    for w in report.witnesses:
        table = ", ".join(f"{k} -> {v}" for k, v in w["table"].items())
        lines.append(f"  [{w['source']}] context {w['context']}: {w['transition']} {w['side']}; f = {table}")
        if "table_upper" in w:
            upper = ", ".join(f"{k} -> {v}" for k, v in w["table_upper"].items())
            lines.append(f"    g = {upper}")
    for n in report.notes:
        lines.append(f"  note: {n}")
    return "\n".join(lines) + "\n"


def cmd_criteria(args, out) -> int:
    lang, _ = load_language(args)
    cfg = _config(args)
    names = list(CHECKERS) if args.criterion == "all" else [args.criterion]
    reports = []
    for name in names:
        report = CHECKERS[name](lang, cfg)
        reports.append(report)
        if not args.json:
            out.write(_report_text(report))
            out.flush()
    if args.json:
        out.write(_dump({"language": lang.name, "reports": [r.to_dict() for r in reports]}) + "\n")
    return VIOLATION if any(r.failed for r in reports) else OK


def cmd_bisim(args, out) -> int:
    lang, _ = load_language(args)
    t1, t2 = lang.parse_term(args.left), lang.parse_term(args.right)
    verdict = are_weakly_bisimilar(
        lang, t1, t2, weak=not args.strong, max_states=args.max_states, max_iterations=args.fuel
    )
    if args.json:
        out.write(_dump(verdict.to_dict()) + "\n")
    else:
        rel = "~" if args.strong else "≈"
        sign = rel if verdict.related else "not " + rel
        out.write(f"{lang.format_term(t1)} {sign} {lang.format_term(t2)}\n")
        if verdict.witness:
            w = verdict.witness
            out.write(
                f"  {w['state']} --{w['observation']}--> {w['successor']} is not matched by {w['unmatched_by']}\n"
            )
    return OK if verdict.related else VIOLATION


def cmd_run(args, out) -> int:
    lang, _ = load_language(args)
    term = lang.parse_term(args.term)
    model = operational_model(lang, [term], max_states=args.max_states)
    if args.weak:
        model = saturate_model(model, max_states=args.max_states, max_iterations=args.fuel)
    doc = model.to_dict()
    if args.json:
        out.write(_dump(doc) + "\n")
    else:
        key = "saturated" if args.weak else "transitions"
        out.write(f"{len(doc['states'])} state(s)\n")
        for src, obs, dst in doc[key]:
            out.write(f"{src} --{obs}--> {dst}\n")
    return OK


def cmd_congruence(args, out) -> int:
    lang, _ = load_language(args)
    result = congruence_search(
        lang, args.depth, weak=not args.strong, max_states=args.max_states, max_iterations=args.fuel
    )
    fmt = lang.format_term
    pairs = []
    for pair in targeted_pairs(lang):
        left = tuple(lang.parse_term(t) for t in pair.left)
        right = tuple(lang.parse_term(t) for t in pair.right)
        args_related = all(are_weakly_bisimilar(lang, a, b).related for a, b in zip(left, right))
        c1, c2 = Node(pair.op, (), left), Node(pair.op, (), right)
        related = are_weakly_bisimilar(lang, c1, c2).related
        pairs.append(
            {
                "name": pair.name,
                "left": fmt(c1),
                "right": fmt(c2),
                "arguments_related": args_related,
                "composites_related": related,
                "violation": args_related and not related,
            }
        )
    violation = bool(result.witnesses) or any(p["violation"] for p in pairs)
    if args.json:
        doc = result.to_dict(fmt)
        doc["targeted"] = pairs
        out.write(_dump(doc) + "\n")
    else:
        out.write(
            f"depth {result.depth}: {result.terms} argument terms, {result.composites} composites, "
            f"{result.classes} classes, {len(result.witnesses)} witness(es)\n"
        )
        for w in result.witnesses[: args.limit]:
            args_text = ", ".join(f"{fmt(a)} ≈ {fmt(b)}" for a, b in zip(w.left_args, w.right_args) if a != b)
            out.write(f"  {args_text} but {fmt(w.left)} ≉ {fmt(w.right)}\n")
        if len(result.witnesses) > args.limit:
            out.write(f"  ... {len(result.witnesses) - args.limit} more\n")
        for p in pairs:
            status = "violation" if p["violation"] else "no violation"
            out.write(f"  targeted {p['name']}: {p['left']} vs {p['right']}: {status}\n")
    return VIOLATION if violation else OK


def cmd_lax(args, out) -> int:
    lang, _ = load_language(args)
    if args.roots:
        roots = [lang.parse_term(r) for r in args.roots]
    elif args.depth is not None:
        roots = lang.enumerate_terms(args.depth)
    else:
        raise UsageError("lax needs root terms or --depth N")
    report = lax_check(
        lang, roots, per_root=not args.joint, max_states=args.max_states, max_iterations=args.fuel
    )
    if args.json:
        out.write(_dump(report.to_dict()) + "\n")
    else:
        out.write(report.summary() + "\n")
        for w in report.witnesses:
            out.write(f"  derived {w['transition']} for {w['composite']} is not a weak transition\n")
        for n in report.notes:
            out.write(f"  note: {n}\n")
    return VIOLATION if report.failed else OK


def cmd_dump(args, out) -> int:
    lang, spec = load_language(args)
    if spec is None:
        doc = {
            "language": "while",
            "variables": list(lang.variables),
            "modulus": lang.modulus,
            "operators": [f"{i.op}/{i.arity}" for i in lang.instances()],
        }
        if args.json:
            out.write(_dump(doc) + "\n")
        else:
            out.write(f"while language over {', '.join(lang.variables)} mod {lang.modulus}\n")
        return OK
    rules = instantiate_schemas(spec)
    if args.json:
        doc = {
            "name": spec.name,
            "labels": spec.signature.all_labels,
            "operators": {k: v.arity for k, v in sorted(spec.signature.operators.items())},
            "rules": [r.name for r in spec.rules],
            "ground_rules": [r.name for r in rules],
            "positive": spec.is_positive,
            "text": format_spec(spec),
        }
        out.write(_dump(doc) + "\n")
    else:
        out.write(format_spec(spec))
        out.write(f"# {len(spec.rules)} rule schema(s), {len(rules)} ground rule(s)\n")
    return OK


# parser


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("language")
    src.add_argument("--builtin", metavar="NAME", help=f"built-in spec: {', '.join(builtin_names())}")
    src.add_argument("--spec", metavar="FILE", help="rule specification file")
    src.add_argument("--lang", choices=("gsos", "while"), default="gsos", help="language kind (default gsos)")
    src.add_argument("--vars", default="v,w", help="While variables, comma separated (default v,w)")
    src.add_argument("--mod", type=int, default=4, help="While arithmetic modulus (default 4)")
    p.add_argument("--json", action="store_true", help="emit one JSON document")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--fuel", type=int, default=1000, help="closure iterations per state (default 1000)")
    p.add_argument("--max-states", type=int, default=500_000, help="state cap for explorations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsos-wb", description="GSOS weak-bisimulation workbench")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("lint", help="check the simply WB cool rule format")
    _common(p)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("criteria", help="check the compositionality criteria")
    _common(p)
    p.add_argument("--criterion", choices=("all", *CHECKERS), default="all")
    p.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    p.add_argument("--form", choices=("strong", "original"), default="strong", help="unitality form")
    p.add_argument("--budget", type=int, default=4096, help="largest table space enumerated exhaustively")
    p.add_argument("--samples", type=int, default=1000, help="tables drawn in sampled mode")
    p.add_argument("--carrier", type=int, default=2, help="abstract carrier size")
    p.add_argument("--labels", default="tau,a,abar", help="labels used in enumerated tables")
    p.add_argument("--max-witnesses", type=int, default=5)
    p.add_argument("--no-targeted", action="store_true", help="skip the targeted witness library")
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("bisim", help="decide weak bisimilarity of two closed terms")
    _common(p)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--strong", action="store_true", help="strong instead of weak bisimilarity")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("run", help="print the operational model of a closed term")
    _common(p)
    p.add_argument("term")
    p.add_argument("--weak", action="store_true", help="print the saturated model")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("congruence", help="search for congruence failures")
    _common(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--strong", action="store_true")
    p.add_argument("--limit", type=int, default=10, help="witnesses printed in text mode")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("lax", help="check the lax model square on term fragments")
    _common(p)
    p.add_argument("roots", nargs="*")
    p.add_argument("--depth", type=int, help="use every term of this depth or less as a root")
    p.add_argument("--joint", action="store_true", help="one joint fragment instead of one per root")
    p.set_defaults(func=cmd_lax)

    p = sub.add_parser("dump", help="print the specification and its ground rules")
    _common(p)
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"gsos-wb: error: {e}", file=sys.stderr)
        return ERROR
    except (GsosError, ValueError) as e:
        print(f"gsos-wb: error: {e}", file=sys.stderr)
        return ERROR


__all__ = ["build_parser", "main"]



if __name__ == "__main__":
    raise SystemExit(main())
