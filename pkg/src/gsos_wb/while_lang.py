"""A small imperative language over the store-passing behaviour
``[P(S x ({done} + -))]^S``.

Stores are tuples of integers modulo ``m``, one slot per variable.  A value
is a frozenset of triples ``(s, s', r)``: from input store ``s`` the program
either terminates in ``s'`` (``r`` is :data:`DONE`) or makes one step to
store ``s'`` and continuation ``r``.  The unit is the silent step
``{(s, s, x)}``; composition chains a step into the continuation's behaviour
at the intermediate store, so every composite is one atomic move.

Programs are ordinary :class:`~gsos_wb.terms.Node` terms with operators
``skip``, ``asn[var, expr]``, ``seq/2`` and ``while[expr]/1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

from .order import OrderedBehavior, Table, UnknownState
from .terms import Leaf, Node, OpInstance, ParseError, Term, TokenStream, state_key

SKIP, ASN, SEQ, WHILE = "skip", "asn", "seq", "while"


class _Done:
    __slots__ = ()

    def __repr__(self) -> str:
        return "DONE"

    def __str__(self) -> str:
        return "✓"

    def __reduce__(self):
        return "DONE"


DONE = _Done()


# expressions


@dataclass(frozen=True)
class Const:
    value: int

    def eval(self, env: dict, m: int) -> int:
        return self.value % m


@dataclass(frozen=True)
class Var:
    name: str

    def eval(self, env: dict, m: int) -> int:
        try:
            return env[self.name]
        except KeyError:
            raise ParseError(f"unknown variable {self.name!r}", 0, self.name) from None


_BINOPS: dict[str, tuple[int, Callable[[int, int], int]]] = {
    "==": (0, lambda a, b: int(a == b)),
    "<": (0, lambda a, b: int(a < b)),
    "+": (1, lambda a, b: a + b),
    "-": (1, lambda a, b: a - b),
    "*": (2, lambda a, b: a * b),
}


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def eval(self, env: dict, m: int) -> int:
        fn = _BINOPS[self.op][1]
        return fn(self.left.eval(env, m), self.right.eval(env, m)) % m


Expr = Const | Var | BinOp


def format_expr(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    p = _BINOPS[e.op][0]
    # left-associative: the right operand binds one level tighter
    text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
    return f"({text})" if p < prec else text


def eval_expr(e: Expr, store: tuple, variables: Sequence[str], m: int) -> int:
    return e.eval(dict(zip(variables, store)), m)


# behaviour


class WhileBehavior(OrderedBehavior):
    name = "while"

    def __init__(self, stores: Sequence[tuple]):
        self.stores = list(stores)

    def unit(self, x):
        return frozenset((s, s, x) for s in self.stores)

    def compose(self, g: Table, v: frozenset) -> frozenset:
        out = set()
        for s, s1, r in v:
            if r is DONE:
                out.add((s, s1, DONE))
                continue
            try:
                nxt = g[r]
            except KeyError:
                raise UnknownState(r) from None
            for s2, r2 in _by_input(nxt).get(s1, ()):
                out.add((s, s2, r2))
        return frozenset(out)

    def join(self, v, w):
        return v | w

    def leq(self, v, w) -> bool:
        return v <= w

    @property
    def bottom(self):
        return frozenset()

    def support(self, v):
        return {r for _, _, r in v if r is not DONE}

    def map_states(self, r: Callable, v):
        return frozenset((s, s1, x if x is DONE else r(x)) for s, s1, x in v)

    def observations(self, v) -> Iterator:
        for s, s1, x in v:
            yield (s, s1), (None if x is DONE else x)

    def difference(self, v, w) -> list:
        return sorted(v - w, key=self.element_key)

    def element_key(self, e) -> tuple:
        return (e[0], e[1], (0,) if e[2] is DONE else (1, state_key(e[2])))

    def atoms(self, states: list) -> list:
        ends = [DONE, *states]
        return [(s, s1, r) for s in self.stores for s1 in self.stores for r in ends]

    def random_value(self, states: list, rng: random.Random):
        ends = [DONE, *states]
        out = set()
        for s in self.stores:
            for _ in range(rng.choice((0, 1, 1, 2))):
                out.add((s, rng.choice(self.stores), rng.choice(ends)))
        return frozenset(out)

    def enumerate_values(self, states: list) -> Iterator[frozenset]:
        atoms = self.atoms(states)
        for bits in itertools.product((False, True), repeat=len(atoms)):
            yield frozenset(a for a, b in zip(atoms, bits) if b)

    def value_space_size(self, n_states: int) -> int:
        return 2 ** (len(self.stores) ** 2 * (n_states + 1))

    def format_element(self, e, fmt: Callable = str) -> str:
        s, s1, r = e
        end = "✓" if r is DONE else fmt(r)
        return f"({format_store(s)}->{format_store(s1)},{end})"

    def format_value(self, v, fmt: Callable = str) -> str:
        if not v:
            return "{}"
        items = sorted(v, key=self.element_key)
        return "{ " + ", ".join(self.format_element(e, fmt) for e in items) + " }"


@lru_cache(maxsize=65536)
def _by_input(v: frozenset) -> dict:
    index: dict = {}
    for s, s1, r in v:
        index.setdefault(s, []).append((s1, r))
    return index


def format_store(s: tuple) -> str:
    return "(" + ",".join(map(str, s)) + ")"


# the language


class WhileLanguage:
    """Store-passing semantics of skip, assignment, sequencing and loops.

    ``assign_exprs`` and ``guard_exprs`` fix the finite set of operator
    instances used when contexts or terms are enumerated; parsing accepts
    any expression.
    """

    is_positive = True

    def __init__(
        self,
        variables: Sequence[str] = ("v", "w"),
        modulus: int = 4,
        assign_exprs: Iterable[Expr] | None = None,
        guard_exprs: Iterable[Expr] | None = None,
    ):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        if not variables:
            raise ValueError("at least one variable is required")
        self.variables = tuple(variables)
        self.modulus = modulus
        self.name = "while"
        self.stores = list(itertools.product(range(modulus), repeat=len(self.variables)))
        self.behavior = WhileBehavior(self.stores)
        first = Var(self.variables[0])
        self.assign_exprs = tuple(assign_exprs or (Const(0), BinOp("+", first, Const(1))))
        self.guard_exprs = tuple(guard_exprs or (first, Const(0)))

    def eval(self, e: Expr, store: tuple) -> int:
        return eval_expr(e, store, self.variables, self.modulus)

    def _assign(self, var: str, e: Expr, s: tuple) -> tuple:
        i = self.variables.index(var)
        return s[:i] + (self.eval(e, s),) + s[i + 1 :]

    def instances(self) -> list[OpInstance]:
        out = [OpInstance(SKIP, (), 0)]
        out += [OpInstance(ASN, (v, e), 0) for v in self.variables for e in self.assign_exprs]
        out.append(OpInstance(SEQ, (), 2))
        out += [OpInstance(WHILE, (e,), 1) for e in self.guard_exprs]
        return out

    def rho(self, op, params, args, values, embed):
        if op == SKIP:
            return frozenset((s, s, DONE) for s in self.stores)
        if op == ASN:
            var, e = params
            return frozenset((s, self._assign(var, e, s), DONE) for s in self.stores)
        if op == SEQ:
            q = embed(args[1])
            out = set()
            for s, s1, r in values[0]:
                out.add((s, s1, q if r is DONE else Node(SEQ, (), (embed(r), q))))
            return frozenset(out)
        if op == WHILE:
            (guard,) = params
            body = embed(args[0])
            loop = Node(WHILE, params, (body,))
            return frozenset(
                (s, s, Node(SEQ, (), (body, loop)) if self.eval(guard, s) != 0 else DONE) for s in self.stores
            )
        raise ValueError(f"unknown operator {op!r}")

    def format_term(self, t: Term) -> str:
        return format_program(t)

    def parse_term(self, text: str) -> Term:
        return parse_program(text, self.variables)

    def enumerate_terms(self, depth: int, leaves: Iterable = ()) -> list[Term]:
        levels: list[Term] = [Leaf(x) for x in leaves]
        levels += [Node(i.op, i.params, ()) for i in self.instances() if i.arity == 0]
        known = set(levels)
        for _ in range(depth):
            fresh = []
            for inst in self.instances():
                if inst.arity == 0:
                    continue
                for args in itertools.product(levels, repeat=inst.arity):
                    t = Node(inst.op, inst.params, args)
                    if t not in known:
                        known.add(t)
                        fresh.append(t)
            levels = levels + fresh
        return sorted(known, key=lambda t: (t.size, format_program(t)))


# concrete syntax


def format_program(t: Term, prec: int = 0) -> str:
    if isinstance(t, Leaf):
        return str(t.value)
    if t.op == SKIP:
        return "skip"
    if t.op == ASN:
        var, e = t.params
        return f"{var} := {format_expr(e)}"
    if t.op == SEQ:
        p, q = t.children
        text = f"{format_program(p, 0)} ; {format_program(q, 1)}"
        return f"({text})" if prec > 0 else text
    if t.op == WHILE:
        return f"while {format_expr(t.params[0])} {{ {format_program(t.children[0])} }}"
    raise ValueError(f"unknown operator {t.op!r}")


def parse_program(text: str, variables: Sequence[str] = ("v", "w")) -> Term:
    """Parse ``skip``, ``v := e``, ``p ; q`` and ``while e { p }``.

    Sequencing is left-associative.  An identifier that is not followed by
    ``:=`` stands for an abstract program (a leaf).
    """
    ts = TokenStream(text)
    t = _parse_seq(ts, tuple(variables))
    if ts.peek.kind != "eof":
        ts.error("unexpected input after program")
    return t


def _parse_seq(ts: TokenStream, variables) -> Term:
    t = _parse_stmt(ts, variables)
    while ts.accept(";"):
        t = Node(SEQ, (), (t, _parse_stmt(ts, variables)))
    return t


def _parse_stmt(ts: TokenStream, variables) -> Term:
    if ts.accept("("):
        t = _parse_seq(ts, variables)
        ts.expect(")")
        return t
    name = ts.ident().text
    if name == SKIP:
        return Node(SKIP, (), ())
    if name == WHILE:
        guard = _parse_expr(ts, variables)
        ts.expect("{")
        body = _parse_seq(ts, variables)
        ts.expect("}")
        return Node(WHILE, (guard,), (body,))
    if ts.accept(":="):
        if name not in variables:
            ts.error(f"assignment to undeclared variable {name!r}")
        return Node(ASN, (name, _parse_expr(ts, variables)), ())
    return Leaf(name)


def _parse_expr(ts: TokenStream, variables, prec: int = 0) -> Expr:
    left = _parse_atom(ts, variables)
    while True:
        tok = ts.peek
        op = tok.text if tok.kind == "sym" else None
        if op not in _BINOPS or _BINOPS[op][0] < prec:
            return left
        ts.next()
        p = _BINOPS[op][0]
        right = _parse_expr(ts, variables, p + 1)
        left = BinOp(op, left, right)
        if p == 0:
            # comparisons do not chain
            return left


def _parse_atom(ts: TokenStream, variables) -> Expr:
    if ts.accept("("):
        e = _parse_expr(ts, variables)
        ts.expect(")")
        return e
    tok = ts.peek
    if tok.kind == "num":
        ts.next()
        return Const(int(tok.text))
    name = ts.ident().text
    if name not in variables:
        ts.error(f"unknown variable {name!r}")
    return Var(name)


__all__ = [
    "ASN",
    "DONE",
    "SEQ",
    "SKIP",
    "WHILE",
    "BinOp",
    "Const",
    "Var",
    "WhileBehavior",
    "WhileLanguage",
    "eval_expr",
    "format_expr",
    "format_program",
    "format_store",
    "parse_program",
]
