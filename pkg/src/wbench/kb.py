"""Signed facts, the line-oriented knowledge-base format and the seed zoo."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple

from .rewrite import GuardOracle, Normalizer
from .terms import (
    FLAGS,
    IDENT_RE,
    RESERVED,
    AtomDecl,
    Kind,
    Term,
    TermSyntaxError,
    kind_implies,
    medv,
    parse_term,
    parse_terms,
)

POSITIVE = {"le": "nle", "prop": "notprop", "leM": "nleM"}
NEGATIVE = {v: k for k, v in POSITIVE.items()}

# Flags that are invariant only under strong equivalence; facts about them are
# kept in SW-normal form so that W-level rewriting cannot merge distinct problems.
SW_FLAGS = frozenset(("stronglyComplete", "cylinder", "natOutput"))


class Fact(NamedTuple):
    """``rel`` is le/nle/prop/notprop/leM/nleM; ``tag`` a Kind or flag name."""

    rel: str
    tag: object
    lhs: Term
    rhs: Term | None = None

    @property
    def positive(self) -> bool:
        return self.rel in POSITIVE

    def negation(self) -> "Fact":
        rel = POSITIVE.get(self.rel) or NEGATIVE[self.rel]
        return Fact(rel, self.tag, self.lhs, self.rhs)

    def __str__(self):
        if self.rel in ("prop", "notprop"):
            return f"{self.rel}({self.tag}, {self.lhs})"
        if self.rel in ("leM", "nleM"):
            return f"{self.rel}({self.lhs.name}, {self.rhs.name})"
        return f"{self.rel}({self.tag}, {self.lhs}, {self.rhs})"

    def to_line(self) -> str:
        """Knowledge-base file spelling."""
        if self.rel in ("prop", "notprop"):
            return f"{self.rel} {self.tag} {self.lhs}"
        if self.rel in ("leM", "nleM"):
            return f"fact {self.rel} {self.lhs.name} {self.rhs.name}"
        return f"fact {self.rel} {self.tag.file_tag} {self.lhs} {self.rhs}"

    def sort_key(self):
        tag = self.tag.value if isinstance(self.tag, Kind) else (self.tag or "")
        rhs = self.rhs.sort_key if self.rhs is not None else ()
        return (self.rel, tag, self.lhs.sort_key, rhs)


def le(kind: Kind, a: Term, b: Term) -> Fact:
    return Fact("le", kind, a, b)


def nle(kind: Kind, a: Term, b: Term) -> Fact:
    return Fact("nle", kind, a, b)


def prop(flag: str, t: Term) -> Fact:
    return Fact("prop", flag, t)


def notprop(flag: str, t: Term) -> Fact:
    return Fact("notprop", flag, t)


def fact_kind(fact: Fact) -> Kind | None:
    """Kind at which the terms of a fact are normalized."""
    if fact.rel in ("le", "nle"):
        return fact.tag
    if fact.rel in ("prop", "notprop"):
        return Kind.SW if fact.tag in SW_FLAGS else Kind.W
    return None


def fact_terms(fact: Fact):
    return (fact.lhs,) if fact.rhs is None else (fact.lhs, fact.rhs)


class KBError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class Statement:
    fact: Fact | None  # None for atom declarations
    atom: str | None
    line: int
    comment: str
    origin: str  # "seed" or "user"

    @property
    def citation(self) -> str:
        return self.comment or ("seed" if self.origin == "seed" else "user input")


def _split_comment(line: str):
    if "#" in line:
        body, comment = line.split("#", 1)
        return body.strip(), comment.strip()
    return line.strip(), ""


def parse_statement(body: str, lineno: int | None = None) -> tuple:
    """Parse one statement body; returns ("atom", name) or ("fact", Fact)."""
    words = body.split(None, 1)
    head = words[0]
    rest = words[1] if len(words) > 1 else ""
    try:
        if head == "atom":
            name = rest.strip()
            if not IDENT_RE.fullmatch(name) or name in RESERVED:
                raise KBError(f"bad atom name {name!r}", lineno)
            return ("atom", name)
        if head in ("prop", "notprop"):
            parts = rest.split(None, 1)
            if len(parts) != 2:
                raise KBError(f"{head} needs a flag and a term", lineno)
            flag, text = parts
            if flag not in FLAGS:
                raise KBError(f"unknown flag {flag!r}", lineno)
            return ("fact", Fact(head, flag, parse_term(text)))
        if head == "fact":
            parts = rest.split(None, 1)
            if len(parts) != 2:
                raise KBError("fact needs a relation", lineno)
            rel, rest2 = parts
            if rel in ("leM", "nleM"):
                syms = rest2.split()
                if len(syms) != 2 or not all(IDENT_RE.fullmatch(s) for s in syms):
                    raise KBError(f"{rel} needs two mass-problem symbols", lineno)
                return ("fact", Fact(rel, None, medv(syms[0]), medv(syms[1])))
            if rel not in ("le", "nle"):
                raise KBError(f"unknown relation {rel!r}", lineno)
            kparts = rest2.split(None, 1)
            if len(kparts) != 2:
                raise KBError("fact needs a kind and two terms", lineno)
            try:
                kind = Kind.parse(kparts[0])
            except ValueError as exc:
                raise KBError(str(exc), lineno) from None
            t1, t2 = parse_terms(kparts[1], 2)
            return ("fact", Fact(rel, kind, t1, t2))
    except TermSyntaxError as exc:
        raise KBError(str(exc), lineno) from None
    raise KBError(f"unknown statement {head!r}", lineno)


class KnowledgeBase(GuardOracle):
    """Declared atoms and given facts.  Closure lives in ``deduction``.

    Rewriting side conditions are discharged only against the given facts,
    never against derived ones, so canonical forms do not drift while a
    closure is running.
    """

    def __init__(self):
        self.atoms: dict = {}
        self.statements: list = []
        self._given: dict = {}
        self._guard_props: dict = {}
        self._guard_nle: dict = {}
        self._normalizer = None
        self._nf: dict = {}

    # -- construction -----------------------------------------------------

    def declare_atom(self, name: str, line: int | None = None, comment: str = "",
                     origin: str = "user"):
        if name not in self.atoms:
            self.atoms[name] = AtomDecl(name)
            self.statements.append(Statement(None, name, line or 0, comment, origin))

    def add_fact(self, fact: Fact, line: int | None = None, comment: str = "",
                 origin: str = "user"):
        if fact.rel not in ("leM", "nleM"):
            for t in fact_terms(fact):
                missing = sorted(t.atoms() - set(self.atoms))
                if missing:
                    raise KBError(f"undeclared atom {missing[0]!r}", line)
        self._normalizer = None
        self._nf = {}
        st = Statement(fact, None, line or 0, comment, origin)
        self.statements.append(st)
        if fact.rel in ("prop", "notprop") and fact.lhs.is_atom:
            self.atoms[fact.lhs.name].set_flag(fact.tag, fact.rel == "prop")
        if fact.rel == "prop":
            self._guard_props[(fact.tag, fact.lhs)] = True
        elif fact.rel == "nle":
            self._guard_nle[(fact.tag, fact.lhs, fact.rhs)] = True
        return st

    def add_line(self, line: str, origin: str = "user"):
        body, comment = _split_comment(line)
        if body:
            self._apply(body, None, comment, origin)

    def _apply(self, body, lineno, comment, origin):
        what, value = parse_statement(body, lineno)
        if what == "atom":
            self.declare_atom(value, lineno, comment, origin)
        else:
            self.add_fact(value, lineno, comment, origin)

    def copy(self) -> "KnowledgeBase":
        kb = KnowledgeBase()
        for st in self.statements:
            if st.fact is None:
                kb.declare_atom(st.atom, st.line, st.comment, st.origin)
            else:
                kb.add_fact(st.fact, st.line, st.comment, st.origin)
        return kb

    def without(self, predicate) -> "KnowledgeBase":
        """Copy dropping every fact statement for which predicate(fact) holds."""
        kb = KnowledgeBase()
        for st in self.statements:
            if st.fact is None:
                kb.declare_atom(st.atom, st.line, st.comment, st.origin)
            elif not predicate(st.fact):
                kb.add_fact(st.fact, st.line, st.comment, st.origin)
        return kb

    # -- views --------------------------------------------------------------

    def given_facts(self):
        """(normalized fact, statement) pairs, duplicates collapsed."""
        out = {}
        for st in self.statements:
            if st.fact is not None:
                nf = self.normalize_fact(st.fact)
                out.setdefault(nf, st)
        return list(out.items())

    def fresh_atom(self, prefix: str = "f") -> str:
        i = 0
        while f"{prefix}{i}" in self.atoms:
            i += 1
        return f"{prefix}{i}"

    def to_text(self) -> str:
        lines = []
        for st in self.statements:
            text = f"atom {st.atom}" if st.fact is None else st.fact.to_line()
            lines.append(f"{text}  # {st.comment}" if st.comment else text)
        return "\n".join(lines) + "\n"

    # -- rewriting support --------------------------------------------------

    def guard_prop(self, flag: str, term: Term) -> bool:
        return (flag, term) in self._guard_props

    def guard_nle(self, kind: Kind, lhs: Term, rhs: Term) -> bool:
        for k in Kind:
            if kind_implies(kind, k) and (k, lhs, rhs) in self._guard_nle:
                return True
        return False

    @property
    def normalizer(self) -> Normalizer:
        if self._normalizer is None:
            self._normalizer = Normalizer(self)
        return self._normalizer

    def normalize(self, t: Term, kind: Kind) -> Term:
        key = (t, kind)
        nf = self._nf.get(key)
        if nf is None:
            nf = self._nf[key] = self.normalizer.normalize(t, kind)
        return nf

    def normalize_fact(self, fact: Fact) -> Fact:
        kind = fact_kind(fact)
        if kind is None:
            return fact
        lhs = self.normalize(fact.lhs, kind)
        rhs = None if fact.rhs is None else self.normalize(fact.rhs, kind)
        if lhs is fact.lhs and rhs is fact.rhs:
            return fact
        return Fact(fact.rel, fact.tag, lhs, rhs)


def load_kb(text: str, origin: str = "user") -> KnowledgeBase:
    kb = KnowledgeBase()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, comment = _split_comment(raw)
        if not body:
            continue
        kb._apply(body, lineno, comment, origin)
    return kb


def seed_text() -> str:
    return resources.files("wbench").joinpath("data/seed.kb").read_text(encoding="utf-8")


def seed_kb() -> KnowledgeBase:
    return load_kb(seed_text(), origin="seed")


def load_kb_source(source: str) -> KnowledgeBase:
    """``seed`` or a path to a knowledge-base file."""
    if source == "seed":
        return seed_kb()
    with open(source, encoding="utf-8") as fh:
        return load_kb(fh.read())
