"""Degree-expression terms, reducibility kinds and the prefix-syntax parser.

Terms are hash-consed: building the same tree twice returns the same object,
so equality checks and dictionary lookups stay cheap inside the closure loop.
"""

from __future__ import annotations

import enum
import random
import re
import threading
from dataclasses import dataclass, field


class Kind(enum.Enum):
    SW = "SW"
    W = "W"
    STW = "STW"
    TW = "TW"
    pW = "pW"
    ptW = "ptW"

    def __str__(self):
        return self.value

    # members are singletons; identity hashing keeps dictionary lookups in C
    __hash__ = object.__hash__

    @classmethod
    def parse(cls, text: str) -> "Kind":
        key = text.strip().upper()
        for k in cls:
            if k.value.upper() == key:
                return k
        raise ValueError(f"unknown reducibility kind {text!r}")

    @property
    def file_tag(self) -> str:
        """Spelling used in knowledge-base files (upper case)."""
        return self.value.upper()


KIND_EDGES = (
    (Kind.SW, Kind.W),
    (Kind.W, Kind.TW),
    (Kind.SW, Kind.STW),
    (Kind.STW, Kind.TW),
    (Kind.W, Kind.pW),
    (Kind.TW, Kind.ptW),
    (Kind.pW, Kind.ptW),
)


def _implication_closure():
    reach = {k: {k} for k in Kind}
    changed = True
    while changed:
        changed = False
        for a, b in KIND_EDGES:
            for k in Kind:
                if a in reach[k] and b not in reach[k]:
                    reach[k].add(b)
                    changed = True
    return {k: frozenset(v) for k, v in reach.items()}


_KIND_REACH = _implication_closure()


def kind_implies(k1: Kind, k2: Kind) -> bool:
    """True when a reduction of kind k1 yields one of kind k2."""
    return k2 in _KIND_REACH[k1]


def weaker_kinds(k: Kind) -> frozenset:
    """All kinds implied by k, k included."""
    return _KIND_REACH[k]


FLAGS = (
    "pointed",
    "cylinder",
    "complete",
    "stronglyComplete",
    "parallelizable",
    "idempotent",
    "computable",
    "continuous",
    "limitComputable",
    "borel",
    "nonUniformlyComputable",
    "natOutput",
)

CONSTANTS = ("0", "1", "INF")
UNARY_OPS = ("comp", "par", "fpar", "neg")
BINARY_OPS = ("prod", "coprod", "meet", "boxsum", "sum", "star", "cimp", "mimp")
MEDVEDEV_OPS = ("otimes", "oplus", "mimpM")
RESERVED = frozenset(("INF", "medv") + UNARY_OPS + BINARY_OPS + MEDVEDEV_OPS)

# constructor rank for the total term order
_RANK = {"0": 0, "1": 1, "INF": 2, "atom": 3, "medv": 4, "var": 5}
for _i, _op in enumerate(UNARY_OPS + BINARY_OPS + MEDVEDEV_OPS):
    _RANK[_op] = 10 + _i

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class Term:
    """Immutable, interned term node.

    ``op`` is "atom", "medv", a constant ("0", "1", "INF") or an operator name.
    ``name`` is set for atoms and Medvedev symbols.
    """

    __slots__ = ("op", "name", "args", "_key", "_size", "_text", "__weakref__")

    _table: dict = {}
    _lock = threading.Lock()

    def __new__(cls, op: str, args: tuple = (), name: str | None = None):
        ident = (op, name, args)
        t = cls._table.get(ident)
        if t is not None:
            return t
        with cls._lock:
            t = cls._table.get(ident)
            if t is None:
                t = object.__new__(cls)
                object.__setattr__(t, "op", op)
                object.__setattr__(t, "name", name)
                object.__setattr__(t, "args", args)
                object.__setattr__(
                    t, "_key", (_RANK[op], name or "", tuple(a._key for a in args))
                )
                object.__setattr__(t, "_size", 1 + sum(a._size for a in args))
                object.__setattr__(t, "_text", None)
                cls._table[ident] = t
        return t

    def __setattr__(self, key, value):
        raise AttributeError("Term is immutable")

    def __reduce__(self):
        return (Term, (self.op, self.args, self.name))

    def __lt__(self, other: "Term") -> bool:
        return self._key < other._key

    def __le__(self, other: "Term") -> bool:
        return self._key <= other._key

    def __gt__(self, other: "Term") -> bool:
        return self._key > other._key

    def __ge__(self, other: "Term") -> bool:
        return self._key >= other._key

    @property
    def sort_key(self):
        return self._key

    @property
    def size(self) -> int:
        return self._size

    @property
    def is_atom(self) -> bool:
        return self.op == "atom"

    @property
    def is_constant(self) -> bool:
        return self.op in CONSTANTS

    def depth(self) -> int:
        if not self.args:
            return 0
        return 1 + max(a.depth() for a in self.args)

    def subterms(self):
        """Yield every subterm, children before parents."""
        for a in self.args:
            yield from a.subterms()
        yield self

    def atoms(self) -> set:
        return {s.name for s in self.subterms() if s.op == "atom"}

    def replace_args(self, args) -> "Term":
        return Term(self.op, tuple(args), self.name)

    def __str__(self):
        if self._text is None:
            object.__setattr__(self, "_text", print_term(self))
        return self._text

    def __repr__(self):
        return f"Term<{self}>"


def atom(name: str) -> Term:
    return Term("atom", (), name)


def medv(symbol: str) -> Term:
    return Term("medv", (), symbol)


def var(name: str) -> Term:
    """Pattern variable (only used inside rewrite and inference rules)."""
    return Term("var", (), name)


def app(op: str, *args: Term) -> Term:
    if op in UNARY_OPS:
        arity = 1
    elif op in BINARY_OPS or op in MEDVEDEV_OPS:
        arity = 2
    else:
        raise ValueError(f"unknown operator {op!r}")
    if len(args) != arity:
        raise ValueError(f"{op} takes {arity} argument(s), got {len(args)}")
    return Term(op, tuple(args))


ZERO = Term("0")
ONE = Term("1")
INF = Term("INF")


def comp(t):
    return Term("comp", (t,))


def par(t):
    return Term("par", (t,))


def fpar(t):
    return Term("fpar", (t,))


def neg(t):
    return Term("neg", (t,))


def print_term(t: Term) -> str:
    if t.op == "atom":
        return t.name
    if t.op in CONSTANTS:
        return t.op
    if t.op == "medv":
        return f"medv({t.name})"
    if t.op == "var":
        return "?" + t.name
    return t.op + "(" + ",".join(print_term(a) for a in t.args) + ")"


@dataclass
class AtomDecl:
    """An atom with three-valued attribute flags (missing means unknown)."""

    name: str
    flags: dict = field(default_factory=dict)

    def flag(self, flag: str):
        if flag not in FLAGS:
            raise KeyError(flag)
        return self.flags.get(flag)

    def set_flag(self, flag: str, value: bool):
        if flag not in FLAGS:
            raise KeyError(flag)
        self.flags[flag] = value


# ---------------------------------------------------------------------------
# parser


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        where = "end of input" if position >= len(text) else f"position {position}"
        super().__init__(f"{message} at {where}")


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<num>[0-9][A-Za-z0-9_]*)|(?P<punct>[(),])"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind in ("ident", "num", "punct"):
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if kind == "end":
            raise TermSyntaxError(f"expected {value!r}", pos, self.text)
        if val != value:
            raise TermSyntaxError(f"expected {value!r}, found {val!r}", pos, self.text)

    def term(self) -> Term:
        kind, val, pos = self.take()
        if kind == "end":
            raise TermSyntaxError("expected a term", pos, self.text)
        if kind == "num":
            if val in ("0", "1"):
                return Term(val)
            raise TermSyntaxError(f"bad constant {val!r}", pos, self.text)
        if kind == "punct":
            raise TermSyntaxError(f"unexpected {val!r}", pos, self.text)
        if val == "INF":
            return INF
        if val == "medv":
            self.expect("(")
            k2, sym, p2 = self.take()
            if k2 != "ident" or sym in RESERVED:
                raise TermSyntaxError("expected a mass-problem symbol", p2, self.text)
            self.expect(")")
            return medv(sym)
        if val in UNARY_OPS or val in BINARY_OPS or val in MEDVEDEV_OPS:
            arity = 1 if val in UNARY_OPS else 2
            self.expect("(")
            args = [self.term()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.term())
            self.expect(")")
            if len(args) != arity:
                raise TermSyntaxError(
                    f"{val} takes {arity} argument(s), got {len(args)}", pos, self.text
                )
            return Term(val, tuple(args))
        return atom(val)


def parse_term(text: str) -> Term:
    """Parse prefix syntax such as ``meet(prod(WKL,LPO), INF)``."""
    p = _Parser(text)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "end":
        raise TermSyntaxError(f"trailing input {val!r}", pos, text)
    return t


def parse_terms(text: str, count: int):
    """Parse ``count`` whitespace-separated terms from one string."""
    p = _Parser(text)
    out = [p.term() for _ in range(count)]
    kind, val, pos = p.peek()
    if kind != "end":
        raise TermSyntaxError(f"trailing input {val!r}", pos, text)
    return out


# ---------------------------------------------------------------------------
# random generation (fuzzing and acceptance sampling)

_LEAF_OPS = ("atom", "atom", "atom", "0", "1", "INF")


def random_term(rng: random.Random, depth: int, atoms=("f", "g", "h"),
                ops=UNARY_OPS + BINARY_OPS, medvedev: bool = False) -> Term:
    """Random term of depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        if medvedev and rng.random() < 0.2:
            return medv(rng.choice(("A", "B", "C")))
        leaf = rng.choice(_LEAF_OPS)
        if leaf == "atom":
            return atom(rng.choice(atoms))
        return Term(leaf)
    choices = list(ops) + (list(MEDVEDEV_OPS) if medvedev else [])
    op = rng.choice(choices)
    if op in UNARY_OPS:
        return Term(op, (random_term(rng, depth - 1, atoms, ops, medvedev),))
    return Term(op, (random_term(rng, depth - 1, atoms, ops, medvedev),
                     random_term(rng, depth - 1, atoms, ops, medvedev)))
