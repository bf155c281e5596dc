"""First-order terms over a signature: the free term monad.

Terms are either leaves (a state, a variable, or a nested term) or nodes
``op[params](children)``.  ``params`` carries the operator's label indices
(for prefixing) or any other hashable data an operator is indexed by.

Concrete syntax for the process-calculus signatures::

    term := atom | label "." term | term "+" term | term "||" term
          | "[" term "]" | ident "(" term {"," term} ")" | "(" term ")"

``+`` binds loosest, then ``||``; both are left-associative and ``.`` binds
tightest.  The reserved operator names ``nil``, ``pre``, ``sum``, ``par``
and ``brk`` use this notation; every other operator prints as ``f(t1,..)``.
"""

from __future__ import annotations

import itertools
import re
import weakref
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Sequence

from .order import GsosError

TAU = "tau"

NIL, PRE, SUM, PAR, BRK = "nil", "pre", "sum", "par", "brk"


class Term:
    __slots__ = ()

    def is_leaf(self) -> bool:
        return isinstance(self, Leaf)


class Leaf(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value: Hashable):
        self.value = value
        self._hash = hash(("leaf", value))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Leaf) and self._hash == other._hash and self.value == other.value

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        return (Leaf, (self.value,))

    def __repr__(self) -> str:
        return f"Leaf({self.value!r})"

    @property
    def size(self) -> int:
        return 1

    @property
    def depth(self) -> int:
        return 0


class Node(Term):
    """An operator applied to parameters and children.

    Nodes are interned, so structurally equal nodes are the same object and
    equality is an identity test.
    """

    __slots__ = ("op", "params", "children", "_hash", "size", "depth", "__weakref__")

    def __new__(cls, op: str, params: tuple = (), children: tuple = ()):
        params, children = tuple(params), tuple(children)
        key = (op, params, children)
        node = _INTERNED.get(key)
        if node is not None:
            return node
        node = object.__new__(cls)
        node.op, node.params, node.children = op, params, children
        node._hash = hash(key)
        node.size = 1 + sum(c.size for c in children)
        node.depth = 1 + max((c.depth for c in children), default=-1)
        _INTERNED[key] = node
        return node

    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        return (Node, (self.op, self.params, self.children))

    def __repr__(self) -> str:
        return f"Node({self.op!r}, {self.params!r}, {self.children!r})"


_INTERNED: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


def leaves(t: Term) -> Iterator[Hashable]:
    if isinstance(t, Leaf):
        yield t.value
    else:
        for c in t.children:
            yield from leaves(c)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Node):
        for c in t.children:
            yield from subterms(c)


def map_leaves(fn: Callable[[Hashable], Term], t: Term) -> Term:
    """Replace every leaf value ``v`` by the term ``fn(v)`` (monadic bind)."""
    if isinstance(t, Leaf):
        return fn(t.value)
    return Node(t.op, t.params, tuple(map_leaves(fn, c) for c in t.children))


def flatten(t: Term) -> Term:
    """Term-monad multiplication: splice leaves that hold terms."""
    if isinstance(t, Leaf):
        return t.value if isinstance(t.value, Term) else t
    return Node(t.op, t.params, tuple(flatten(c) for c in t.children))


def substitute(t: Term, binding: dict) -> Term:
    """Replace leaves whose value is a key of ``binding`` by the bound term."""
    if isinstance(t, Leaf):
        return binding.get(t.value, t)
    return Node(t.op, t.params, tuple(substitute(c, binding) for c in t.children))


def is_closed(t: Term) -> bool:
    return next(leaves(t), None) is None


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class OpDecl:
    name: str
    arity: int
    label_params: int = 0


@dataclass(frozen=True)
class OpInstance:
    """An operator with its indices fixed, i.e. one symbol of the signature."""

    op: str
    params: tuple
    arity: int


class SignatureError(GsosError):
    pass


class TauHasNoCoaction(SignatureError):
    pass


class UnpairedLabel(SignatureError):
    pass


@dataclass(eq=False)
class Signature:
    operators: dict = field(default_factory=dict)
    labels: list = field(default_factory=list)
    pairs: dict = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Signature)
            and self.operators == other.operators
            and set(self.labels) == set(other.labels)
            and self.pairs == other.pairs
        )

    def add_operator(self, name: str, arity: int, label_params: int = 0) -> None:
        if name in self.operators:
            raise SignatureError(f"duplicate operator {name!r}")
        if arity < 0:
            raise SignatureError("arity must be non-negative")
        self.operators[name] = OpDecl(name, arity, label_params)

    def add_label(self, label: str) -> None:
        if label != TAU and label not in self.labels:
            self.labels.append(label)

    def add_pair(self, a: str, b: str) -> None:
        if TAU in (a, b):
            raise TauHasNoCoaction("tau cannot be paired")
        if a == b:
            raise SignatureError(f"label {a!r} cannot be its own coaction")
        for x, y in ((a, b), (b, a)):
            if self.pairs.get(x, y) != y:
                raise SignatureError(f"label {x!r} already paired with {self.pairs[x]!r}")
        self.add_label(a)
        self.add_label(b)
        self.pairs[a] = b
        self.pairs[b] = a

    @property
    def all_labels(self) -> list:
        return [TAU] + sorted(self.labels)

    @property
    def visible_labels(self) -> list:
        return sorted(self.labels)

    def is_label(self, name: str) -> bool:
        return name == TAU or name in self.labels

    def coaction(self, label: str) -> str:
        if label == TAU:
            raise TauHasNoCoaction("tau has no coaction")
        try:
            return self.pairs[label]
        except KeyError:
            raise UnpairedLabel(f"label {label!r} has no declared coaction") from None

    def instances(self) -> list[OpInstance]:
        out = []
        for decl in self.operators.values():
            for params in itertools.product(self.all_labels, repeat=decl.label_params):
                out.append(OpInstance(decl.name, params, decl.arity))
        return out


def bar_label(label: str, sig: Signature) -> str:
    return sig.coaction(label)


def label_key(label: Any) -> tuple:
    return (0, "") if label == TAU else (1, str(label))


# ---------------------------------------------------------------------------
# printing

_PREC = {SUM: 1, PAR: 2}


def format_term(t: Term, leaf: Callable[[Hashable], str] | None = None) -> str:
    return _fmt(t, 0, leaf or _default_leaf)


def _default_leaf(v: Hashable) -> str:
    if isinstance(v, Term):
        return "{" + format_term(v) + "}"
    return str(v)


def _fmt(t: Term, prec: int, leaf: Callable) -> str:
    if isinstance(t, Leaf):
        return leaf(t.value)
    op, ch = t.op, t.children
    if op == NIL and not ch:
        return "0"
    if op == PRE and len(ch) == 1 and len(t.params) == 1:
        return f"{t.params[0]}.{_fmt(ch[0], 3, leaf)}"
    if op in _PREC and len(ch) == 2:
        p = _PREC[op]
        sym = " + " if op == SUM else " || "
        s = _fmt(ch[0], p, leaf) + sym + _fmt(ch[1], p + 1, leaf)
        return f"({s})" if p < prec else s
    if op == BRK and len(ch) == 1 and not t.params:
        return "[" + _fmt(ch[0], 0, leaf) + "]"
    head = op + ("[" + ",".join(map(str, t.params)) + "]" if t.params else "")
    if not ch:
        return head
    return head + "(" + ", ".join(_fmt(c, 0, leaf) for c in ch) + ")"


def term_key(t: Term) -> tuple:
    """Canonical order: size, then printed form."""
    return (t.size, format_term(t))


def state_key(x: Any) -> tuple:
    """Total order on heterogeneous states for deterministic output."""
    if isinstance(x, Term):
        return (2, x.size, format_term(x))
    if isinstance(x, tuple):
        return (1, tuple(state_key(y) for y in x))
    return (0, type(x).__name__, str(x))


# ---------------------------------------------------------------------------
# enumeration


def enumerate_terms(
    sig: Signature | Sequence[OpInstance],
    depth: int,
    leaves: Iterable[Hashable] = (),
    key: Callable[[Term], Any] = term_key,
) -> list[Term]:
    """All terms of depth at most ``depth`` (leaves and constants have depth 0)."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    instances = sig.instances() if isinstance(sig, Signature) else list(sig)
    level: set = {Leaf(x) for x in leaves}
    level |= {Node(i.op, i.params, ()) for i in instances if i.arity == 0}
    for _ in range(depth):
        pool = list(level)
        nxt = set(level)
        for inst in instances:
            if inst.arity == 0:
                continue
            for args in itertools.product(pool, repeat=inst.arity):
                nxt.add(Node(inst.op, inst.params, args))
        level = nxt
    return sorted(level, key=key)


# ---------------------------------------------------------------------------
# lexing and parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<sym>==>|-/>|->|\|\||:=|==|[-+.,;:/\[\](){}~<*=])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


class ParseError(GsosError):
    def __init__(self, message: str, pos: int = -1, text: str = ""):
        self.pos = pos
        if pos >= 0 and text:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{message} at line {line}, column {col}"
        super().__init__(message)


class UnknownOperator(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class TokenStream:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.toks[self.i]

    def peek_at(self, k: int) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek.text == text and self.peek.kind in ("sym", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.peek.text or 'end of input'!r}")
        return self.next()

    def ident(self) -> Token:
        if self.peek.kind != "ident":
            self.error(f"expected identifier, found {self.peek.text or 'end of input'!r}")
        return self.next()

    def error(self, message: str, cls: type = ParseError, tok: Token | None = None):
        raise cls(message, (tok or self.peek).pos, self.text)


class TermParser:
    """Recursive-descent parser for process terms.

    ``label_of`` turns a label token into whatever the caller stores in a
    ``pre`` node (a concrete label, or a label expression inside rules); it
    returns ``None`` when the token is not a label.
    """

    def __init__(self, sig: Signature, label_of: Callable[[TokenStream], Any] | None = None):
        self.sig = sig
        self.label_of = label_of or self._concrete_label

    def _concrete_label(self, ts: TokenStream):
        tok = ts.peek
        if tok.kind == "ident" and self.sig.is_label(tok.text) and ts.peek_at(1).text == ".":
            ts.next()
            return tok.text
        return None

    def parse(self, ts: TokenStream) -> Term:
        return self.sum(ts)

    def sum(self, ts: TokenStream) -> Term:
        t = self.par(ts)
        while ts.at("+"):
            tok = ts.next()
            t = self._node(SUM, (), (t, self.par(ts)), ts, tok)
        return t

    def par(self, ts: TokenStream) -> Term:
        t = self.prefix(ts)
        while ts.at("||"):
            tok = ts.next()
            t = self._node(PAR, (), (t, self.prefix(ts)), ts, tok)
        return t

    def prefix(self, ts: TokenStream) -> Term:
        tok = ts.peek
        label = self.label_of(ts)
        if label is not None:
            ts.expect(".")
            return self._node(PRE, (label,), (self.prefix(ts),), ts, tok)
        return self.atom(ts)

    def atom(self, ts: TokenStream) -> Term:
        tok = ts.peek
        if tok.kind == "num":
            if tok.text != "0":
                ts.error(f"unexpected number {tok.text}")
            ts.next()
            return self._node(NIL, (), (), ts, tok)
        if ts.accept("("):
            t = self.parse(ts)
            ts.expect(")")
            return t
        if ts.accept("["):
            t = self.parse(ts)
            ts.expect("]")
            return self._node(BRK, (), (t,), ts, tok)
        if tok.kind == "ident":
            ts.next()
            if ts.accept("("):
                args = [self.parse(ts)]
                while ts.accept(","):
                    args.append(self.parse(ts))
                ts.expect(")")
                return self._node(tok.text, (), tuple(args), ts, tok)
            decl = self.sig.operators.get(tok.text)
            if decl is not None and decl.arity == 0 and decl.label_params == 0:
                return Node(tok.text)
            return Leaf(tok.text)
        ts.error(f"unexpected {tok.text or 'end of input'!r}")

    def _node(self, op: str, params: tuple, children: tuple, ts: TokenStream, tok: Token) -> Node:
        decl = self.sig.operators.get(op)
        if decl is None:
            ts.error(f"unknown operator {op!r}", UnknownOperator, tok)
        if decl.arity != len(children) or decl.label_params != len(params):
            ts.error(
                f"operator {op!r} expects {decl.arity} argument(s) and "
                f"{decl.label_params} label(s)",
                ArityMismatch,
                tok,
            )
        return Node(op, params, children)


def parse_term(text: str, sig: Signature) -> Term:
    ts = TokenStream(text)
    t = TermParser(sig).parse(ts)
    if ts.peek.kind != "eof":
        ts.error(f"trailing input {ts.peek.text!r}")
    return t
