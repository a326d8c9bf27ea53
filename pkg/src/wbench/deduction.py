"""Forward-chaining closure of a fact base, with proof traces.

Inference rules are Horn clauses over fact patterns.  Each rule may also
require terms of a given shape to lie in the universe (``in(...)`` premises);
those act as generators and keep the closure finite.  Contrapositives of every
rule are generated mechanically.
"""

from __future__ import annotations

import re
from functools import lru_cache
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .kb import (
    Fact,
    KBError,
    KnowledgeBase,
    fact_kind,
    fact_terms,
)
from .rewrite import instantiate, match
from .terms import (
    FLAGS,
    KIND_EDGES,
    UNARY_OPS,
    Kind,
    Term,
    atom,
    parse_term,
    var,
)

# ---------------------------------------------------------------------------
# rule language

_VARNAMES = frozenset(("f", "g", "h", "f2", "g2", "h2"))


def _pattern(text: str) -> Term:
    def conv(t: Term) -> Term:
        if t.op == "atom" and t.name in _VARNAMES:
            return var(t.name)
        if not t.args:
            return t
        return t.replace_args(conv(a) for a in t.args)

    return conv(parse_term(text))


def _split_args(text: str):
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur.strip())
    return parts


_ATOM_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def _parse_item(text: str):
    m = _ATOM_RE.match(text)
    if not m:
        raise ValueError(f"bad rule item {text!r}")
    rel, body = m.group(1), m.group(2)
    args = _split_args(body)
    if rel == "in":
        return ("in", _pattern(body))
    if rel in ("le", "nle"):
        return ("fact", Fact(rel, Kind.parse(args[0]), _pattern(args[1]), _pattern(args[2])))
    if rel in ("prop", "notprop"):
        if args[0] not in FLAGS:
            raise ValueError(args[0])
        return ("fact", Fact(rel, args[0], _pattern(args[1])))
    if rel in ("leM", "nleM"):
        return ("fact", Fact(rel, None, _pattern(args[0]), _pattern(args[1])))
    raise ValueError(f"unknown relation {rel!r}")


@lru_cache(maxsize=None)
def _pattern_vars(t: Term | None) -> frozenset:
    if t is None:
        return frozenset()
    return frozenset(s.name for s in t.subterms() if s.op == "var")


def _fact_vars(f: Fact) -> set:
    return _pattern_vars(f.lhs) | _pattern_vars(f.rhs)


@dataclass(frozen=True)
class InferenceRule:
    name: str
    family: str
    premises: tuple  # fact patterns
    universe: tuple  # term patterns that must lie in the universe
    conclusion: Fact
    law: str

    def __str__(self):
        items = [str(p) for p in self.premises] + [f"in({u})" for u in self.universe]
        lhs = " & ".join(items) if items else "true"
        return f"{self.name}: {lhs} => {self.conclusion}"


def _rule(name, family, text, law):
    lhs, rhs = text.split("=>")
    premises, universe = [], []
    for item in [s for s in re.split(r"\s&\s", lhs) if s.strip()]:
        what, val = _parse_item(item)
        (premises if what == "fact" else universe).append(val)
    what, concl = _parse_item(rhs)
    if what != "fact":
        raise ValueError("conclusion must be a fact")
    bound = set()
    for p in premises:
        bound |= _fact_vars(p)
    for u in universe:
        bound |= _pattern_vars(u)
    if not _fact_vars(concl) <= bound:
        raise ValueError(f"{name}: unbound conclusion variables")
    return InferenceRule(name, family, tuple(premises), tuple(universe), concl, law)


def _contrapositives(rule: InferenceRule):
    """From not-C and all premises but one, conclude the negation of that one."""
    if not rule.conclusion.positive:
        return []
    out = []
    for i, p in enumerate(rule.premises):
        if not p.positive:
            continue
        others = rule.premises[:i] + rule.premises[i + 1:]
        premises = (rule.conclusion.negation(),) + others
        bound = set()
        for q in premises:
            bound |= _fact_vars(q)
        for u in rule.universe:
            bound |= _pattern_vars(u)
        if not _fact_vars(p) <= bound:
            continue
        out.append(InferenceRule(
            f"{rule.name}~{i + 1}", "D19", premises, rule.universe, p.negation(),
            f"contrapositive of {rule.name} ({rule.law})",
        ))
    return out


FAMILY_LAWS = {
    "D1": "each reducibility is a preorder",
    "D2": "a reduction of a stronger kind is one of every weaker kind",
    "D3": "total reducibility is reducibility to the completion",
    "D4": "parallelized reducibilities are reducibility to the parallelization",
    "D5": "completion is monotone",
    "D6": "the algebraic operations are monotone",
    "D7": "suprema and infima in the partial and total lattices",
    "D8": "below a (strongly) complete problem total and partial reducibility agree",
    "D9": "below a cylinder strong and ordinary reducibility agree",
    "D10": "the operations preserve (strong) completeness",
    "D11": "total reducibility preserves computability-like classes downwards",
    "D12": "bottom, unit and top elements",
    "D13": "order of operations on completed problems",
    "D14": "residuation laws for the implications",
    "D15": "completion against compositional product and implication",
    "D16": "completion and cylindrification",
    "D17": "constant problems embed Medvedev reducibility",
    "D18": "implication adjunction in the parallelized total degrees",
    "D19": "contrapositives of the Horn rules",
    "D20": "completion and parallelization are closure operators",
    "D21": "compositional product below parallelized completion times a natural-number problem",
}


def _build_rules():
    rules = []

    def add(name, text, law=None):
        family = name.split(".")[0]
        rules.append(_rule(name, family, text, law or FAMILY_LAWS[family]))

    SW, W, STW, TW, pW, ptW = (k.value for k in Kind)
    for k in Kind:
        add(f"D1.refl.{k}", f"in(f) => le({k},f,f)", "reflexivity")
        add(f"D1.trans.{k}", f"le({k},f,g) & le({k},g,h) => le({k},f,h)", "transitivity")
    for a, b in KIND_EDGES:
        add(f"D2.{a}-{b}", f"le({a},f,g) => le({b},f,g)")
    add("D3.a", "le(TW,f,g) => le(W,f,comp(g))")
    add("D3.b", "le(W,f,comp(g)) => le(TW,f,g)")
    add("D3.c", "le(STW,f,g) => le(SW,f,comp(g))")
    add("D3.d", "le(SW,f,comp(g)) => le(STW,f,g)")
    add("D4.a", "le(pW,f,g) => le(W,f,par(g))")
    add("D4.b", "le(W,f,par(g)) => le(pW,f,g)")
    add("D4.c", "le(ptW,f,g) => le(W,f,par(comp(g)))")
    add("D4.d", "le(W,f,par(comp(g))) => le(ptW,f,g)")
    add("D5.W", "le(W,f,g) => le(W,comp(f),comp(g))")
    add("D5.SW", "le(SW,f,g) => le(SW,comp(f),comp(g))")
    for op in ("prod", "coprod", "meet", "boxsum", "sum"):
        for k in (W, SW):
            add(f"D6.{op}.{k}",
                f"le({k},f,f2) & le({k},g,g2) & in({op}(f,g)) & in({op}(f2,g2))"
                f" => le({k},{op}(f,g),{op}(f2,g2))")
    add("D6.star.W", "le(W,f,f2) & le(W,g,g2) & in(star(f,g)) & in(star(f2,g2))"
        " => le(W,star(f,g),star(f2,g2))")
    add("D6.cimp.W", "le(W,f,f2) & le(W,g2,g) & in(cimp(g,f)) & in(cimp(g2,f2))"
        " => le(W,cimp(g,f),cimp(g2,f2))",
        "compositional implication is antitone in the hypothesis, monotone in the conclusion")
    add("D6.mimp.W", "le(W,f,f2) & le(W,g2,g) & prop(pointed,g2) & in(mimp(g,f)) & in(mimp(g2,f2))"
        " => le(W,mimp(g,f),mimp(g2,f2))",
        "multiplicative implication is antitone in a pointed hypothesis, monotone in the conclusion")
    add("D7.coprod.l", "in(coprod(f,g)) => le(SW,f,coprod(f,g))")
    add("D7.coprod.r", "in(coprod(f,g)) => le(SW,g,coprod(f,g))")
    add("D7.coprod.sup.W", "le(W,f,h) & le(W,g,h) & in(coprod(f,g)) => le(W,coprod(f,g),h)")
    add("D7.coprod.sup.TW", "le(TW,f,h) & le(TW,g,h) & in(coprod(f,g)) => le(TW,coprod(f,g),h)")
    add("D7.meet.l", "in(meet(f,g)) => le(SW,meet(f,g),f)")
    add("D7.meet.r", "in(meet(f,g)) => le(SW,meet(f,g),g)")
    add("D7.meet.inf.W", "le(W,h,f) & le(W,h,g) & in(meet(f,g)) => le(W,h,meet(f,g))")
    add("D7.meet.inf.SW", "le(SW,h,f) & le(SW,h,g) & in(meet(f,g)) => le(SW,h,meet(f,g))")
    add("D7.boxsum.l", "in(boxsum(f,g)) => le(SW,f,boxsum(f,g))")
    add("D7.boxsum.r", "in(boxsum(f,g)) => le(SW,g,boxsum(f,g))")
    add("D7.boxsum.sup.SW", "le(SW,f,h) & le(SW,g,h) & in(boxsum(f,g)) => le(SW,boxsum(f,g),h)")
    add("D7.boxsum.sup.STW",
        "le(STW,f,h) & le(STW,g,h) & in(boxsum(f,g)) => le(STW,boxsum(f,g),h)")
    add("D7.boxsum.coprod", "in(boxsum(f,g)) & in(coprod(f,g)) => le(W,boxsum(f,g),coprod(f,g))",
        "box sum and coproduct are W-equivalent")
    add("D7.coprod.boxsum", "in(boxsum(f,g)) & in(coprod(f,g)) => le(W,coprod(f,g),boxsum(f,g))",
        "box sum and coproduct are W-equivalent")
    for k in (TW, STW):
        add(f"D7.cmeet.inf.{k}",
            f"le({k},h,f) & le({k},h,g) & in(meet(comp(f),comp(g))) => le({k},h,meet(comp(f),comp(g)))")
    add("D8.TW", "prop(complete,g) & le(TW,f,g) => le(W,f,g)")
    add("D8.STW", "prop(stronglyComplete,g) & le(STW,f,g) => le(SW,f,g)")
    add("D8.strong", "prop(stronglyComplete,f) => prop(complete,f)",
        "strongly complete problems are complete")
    add("D8.def.W", "prop(complete,f) & in(comp(f)) => le(W,comp(f),f)",
        "a complete problem is equivalent to its completion")
    add("D8.undef.W", "le(W,comp(f),f) => prop(complete,f)",
        "a complete problem is equivalent to its completion")
    add("D8.def.SW", "prop(stronglyComplete,f) & in(comp(f)) => le(SW,comp(f),f)",
        "a strongly complete problem is strongly equivalent to its completion")
    add("D8.undef.SW", "le(SW,comp(f),f) => prop(stronglyComplete,f)",
        "a strongly complete problem is strongly equivalent to its completion")
    add("D9.W", "prop(cylinder,g) & le(W,f,g) => le(SW,f,g)")
    add("D9.TW", "prop(cylinder,g) & le(TW,f,g) => le(STW,f,g)")
    for strength in ("complete", "stronglyComplete"):
        for op in ("prod", "coprod", "boxsum", "meet", "sum", "star"):
            add(f"D10.{op}.{strength}",
                f"prop({strength},f) & prop({strength},g) & in({op}(f,g)) => prop({strength},{op}(f,g))")
        for op in ("par", "fpar"):
            add(f"D10.{op}.{strength}", f"prop({strength},f) & in({op}(f)) => prop({strength},{op}(f))")
    for flag in ("computable", "continuous", "limitComputable", "borel", "nonUniformlyComputable"):
        add(f"D11.{flag}", f"le(TW,f,g) & prop({flag},g) => prop({flag},f)")
    add("D12.bottom", "in(f) => le(SW,0,f)", "0 is the least element")
    add("D12.top", "in(f) => le(SW,f,INF)", "INF is the greatest element")
    add("D12.unit", "in(1) => le(TW,1,0)", "1 is totally equivalent to 0")
    add("D12.computable.a", "le(TW,f,1) => prop(computable,f)",
        "the computable problems are exactly those totally below 1")
    add("D12.computable.b", "prop(computable,f) & in(1) => le(TW,f,1)",
        "the computable problems are exactly those totally below 1")
    add("D13.sum-meet", "in(sum(comp(f),comp(g))) & in(meet(comp(f),comp(g)))"
        " => le(SW,sum(comp(f),comp(g)),meet(comp(f),comp(g)))")
    add("D13.meet-boxsum", "in(meet(comp(f),comp(g))) & in(boxsum(comp(f),comp(g)))"
        " => le(SW,meet(comp(f),comp(g)),boxsum(comp(f),comp(g)))")
    add("D13.boxsum-coprod", "in(boxsum(comp(f),comp(g))) & in(coprod(comp(f),comp(g)))"
        " => le(SW,boxsum(comp(f),comp(g)),coprod(comp(f),comp(g)))")
    add("D13.coprod-prod", "in(coprod(comp(f),comp(g))) & in(prod(comp(f),comp(g)))"
        " => le(W,coprod(comp(f),comp(g)),prod(comp(f),comp(g)))")
    add("D13.boxsum-prod", "in(boxsum(comp(f),comp(g))) & in(prod(comp(f),comp(g)))"
        " => le(SW,boxsum(comp(f),comp(g)),prod(comp(f),comp(g)))")
    add("D13.fpar-par", "in(fpar(comp(f))) & in(par(comp(f))) => le(W,fpar(comp(f)),par(comp(f)))")
    add("D14.a", "le(W,cimp(g,f),h) & in(star(g,h)) => le(W,f,star(g,h))",
        "compositional implication is residual to compositional product")
    add("D14.b", "le(W,f,star(g,h)) & in(cimp(g,f)) => le(W,cimp(g,f),h)",
        "compositional implication is residual to compositional product")
    add("D14.c", "le(W,f,prod(g,h)) & in(mimp(g,f)) => le(W,mimp(g,f),h)",
        "multiplicative implication lies below any co-factor of a product")
    add("D14.d", "prop(pointed,g) & le(W,mimp(g,f),h) & in(star(g,h)) => le(W,f,star(g,h))",
        "multiplicative implication yields a compositional factorization for pointed hypotheses")
    add("D14.e", "prop(pointed,g) & in(cimp(g,f)) & in(mimp(g,f)) => le(W,cimp(g,f),mimp(g,f))",
        "compositional below multiplicative implication for pointed hypotheses")
    add("D14.f", "prop(pointed,g) & le(W,mimp(g,f),h) & in(prod(par(comp(g)),h))"
        " => le(W,f,prod(par(comp(g)),h))",
        "multiplicative deduction through the parallelized completion")
    add("D14.g", "prop(parallelizable,g) & prop(complete,g) & le(W,mimp(g,f),h) & in(prod(g,h))"
        " => le(W,f,prod(g,h))",
        "multiplicative deduction for parallelizable complete hypotheses")
    add("D15.star", "in(comp(star(f,g))) & in(star(comp(f),comp(g)))"
        " => le(SW,comp(star(f,g)),star(comp(f),comp(g)))")
    add("D15.cimp", "in(cimp(comp(g),comp(f))) & in(comp(cimp(g,f)))"
        " => le(W,cimp(comp(g),comp(f)),comp(cimp(g,f)))")
    add("D16.a", "prop(stronglyComplete,f) & prop(cylinder,f) & in(comp(f)) => prop(cylinder,comp(f))")
    add("D16.b", "prop(cylinder,comp(f)) => prop(stronglyComplete,f)")
    add("D16.c", "prop(cylinder,comp(f)) => prop(cylinder,f)")
    add("D16.d", "prop(complete,f) & in(prod(1,f)) => prop(complete,prod(1,f))")
    add("D16.e", "prop(complete,prod(1,f)) => prop(complete,f)")
    add("D17.a", "leM(f,g) => le(W,f,g)")
    add("D17.b", "le(W,f,g) => leM(f,g)")
    add("D18.a", "le(ptW,mimp(par(comp(g)),par(comp(f))),h) & in(coprod(g,h)) => le(ptW,f,coprod(g,h))")
    add("D18.b", "le(ptW,f,coprod(g,h)) & in(mimp(par(comp(g)),par(comp(f))))"
        " => le(ptW,mimp(par(comp(g)),par(comp(f))),h)")
    add("D20.comp", "in(comp(f)) => le(SW,f,comp(f))", "completion is extensive")
    add("D20.par", "in(par(f)) => le(SW,f,par(f))", "parallelization is extensive")
    add("D20.fpar", "in(fpar(f)) => le(W,f,fpar(f))", "finite parallelization is extensive")
    add("D20.par.W", "le(W,f,g) => le(W,par(f),par(g))", "parallelization is monotone")
    add("D20.par.SW", "le(SW,f,g) => le(SW,par(f),par(g))", "parallelization is monotone")
    add("D20.fpar.W", "le(W,f,g) => le(W,fpar(f),fpar(g))", "finite parallelization is monotone")
    add("D20.closed", "in(comp(f)) => prop(stronglyComplete,comp(f))",
        "a completion is strongly complete")
    add("D21", "prop(natOutput,h) & in(star(g,h)) & in(prod(par(comp(g)),h))"
        " => le(W,star(g,h),prod(par(comp(g)),h))")
    for r in list(rules):
        rules.extend(_contrapositives(r))
    names = [r.name for r in rules]
    assert len(names) == len(set(names)), "duplicate rule names"
    return tuple(rules)


RULES = _build_rules()
RULES_BY_NAME = {r.name: r for r in RULES}


def inference_rules():
    return list(RULES)


def rule_families():
    out = {}
    for r in RULES:
        out.setdefault(r.family, []).append(r)
    return out


def lookup_rule(name: str):
    """A rule by exact name, or every rule of a family ("D3")."""
    if name in RULES_BY_NAME:
        return [RULES_BY_NAME[name]]
    fam = [r for r in RULES if r.family == name]
    if not fam:
        raise KeyError(name)
    return fam


# ---------------------------------------------------------------------------
# closure


class Derivation(NamedTuple):
    rule: str  # rule name, or "given"
    premises: tuple  # facts
    subst: tuple  # sorted (variable, term) pairs
    citation: str


@dataclass
class ProofTrace:
    conclusion: Fact
    rule: str
    citation: str
    premises: list = field(default_factory=list)

    def depth(self) -> int:
        return 1 + max((p.depth() for p in self.premises), default=0)


@dataclass
class Contradiction:
    positive: ProofTrace
    negative: ProofTrace

    def __str__(self):
        return f"{self.positive.conclusion}  vs  {self.negative.conclusion}"


class ContradictionError(RuntimeError):
    def __init__(self, contradictions):
        self.contradictions = contradictions
        super().__init__("; ".join(str(c) for c in contradictions))


def build_universe(kb: KnowledgeBase, facts, extra_terms=(), depth: int = 1):
    """Subterm closure of the facts and extra terms, unary-expanded ``depth`` times,
    then extended by the canonical forms of its members at every kind."""
    base: dict = {}

    def add_sub(t):
        for s in t.subterms():
            base.setdefault(s, None)

    for name in kb.atoms:
        add_sub(atom(name))
    for f in facts:
        for t in fact_terms(f):
            add_sub(t)
    for t in extra_terms:
        add_sub(t)
    for c in (Term("0"), Term("1"), Term("INF")):
        base.setdefault(c, None)
    layer = list(base)
    for _ in range(depth):
        nxt = []
        for t in layer:
            if t.op == "medv":
                continue
            for op in UNARY_OPS:
                u = Term(op, (t,))
                if u not in base:
                    base[u] = None
                    nxt.append(u)
        layer = nxt
    universe = dict(base)
    for t in list(base):
        for k in Kind:
            add_to = kb.normalize(t, k)
            for s in add_to.subterms():
                universe.setdefault(s, None)
    return universe


class Closure:
    """Saturated fact base.  Build with :func:`close`."""

    def __init__(self, kb: KnowledgeBase, depth: int = 1, extra_terms=(),
                 rules=RULES):
        self.kb = kb
        self.depth = depth
        self.extra_terms = tuple(extra_terms)
        self.rules = rules
        self.facts: dict = {}
        self.contradictions: list = []
        self._by_tag: dict = {}
        self._by_lhs: dict = {}
        self._by_rhs: dict = {}
        self._queue: deque = deque()
        given = kb.given_facts()
        norm_extra = []
        for t in self.extra_terms:
            norm_extra.append(t)
            for k in Kind:
                norm_extra.append(kb.normalize(t, k))
        self.universe = build_universe(kb, [f for f, _ in given], norm_extra, depth)
        self._u_by_op: dict = {}
        self._u_by_arg: dict = {}
        for t in self.universe:
            self._u_by_op.setdefault(t.op, []).append(t)
            for i, a in enumerate(t.args):
                self._u_by_arg.setdefault((t.op, i, a), []).append(t)
        self._u_list = list(self.universe)
        self._plans: dict = {}
        for rule in rules:
            for i, p in enumerate(rule.premises):
                rest = [("fact", q) for j, q in enumerate(rule.premises) if j != i]
                rest += [("in", u) for u in rule.universe]
                steps = self._plan(rest, _fact_vars(p))
                self._plans.setdefault((p.rel, p.tag), []).append((rule, p, steps))
        for fact, st in given:
            self._add(fact, Derivation("given", (), (), st.citation))
        for rule in rules:
            if not rule.premises:
                steps = self._plan([("in", u) for u in rule.universe], ())
                self._exec(rule, steps, 0, {})
        self._run()

    # -- storage ------------------------------------------------------------

    def _add(self, fact: Fact, deriv: Derivation):
        if fact in self.facts:
            return
        self.facts[fact] = deriv
        key = (fact.rel, fact.tag)
        self._by_tag.setdefault(key, []).append(fact)
        self._by_lhs.setdefault((fact.rel, fact.tag, fact.lhs), []).append(fact)
        if fact.rhs is not None:
            self._by_rhs.setdefault((fact.rel, fact.tag, fact.rhs), []).append(fact)
        self._queue.append(fact)
        other = fact.negation()
        if other in self.facts:
            pos, negf = (fact, other) if fact.positive else (other, fact)
            self.contradictions.append((pos, negf))

    def _run(self):
        plans = self._plans
        queue = self._queue
        while queue:
            fact = queue.popleft()
            for rule, p, steps in plans.get((fact.rel, fact.tag), ()):
                s = self._match_fact(p, fact, {})
                if s is not None:
                    self._exec(rule, steps, 0, s)

    # -- matching -----------------------------------------------------------

    @staticmethod
    def _match_fact(p: Fact, fact: Fact, s: dict):
        s = dict(s)
        for pat, t in ((p.lhs, fact.lhs), (p.rhs, fact.rhs)):
            if pat is None:
                break
            if pat.op == "var":
                bound = s.get(pat.name)
                if bound is None:
                    s[pat.name] = t
                elif bound is not t:
                    return None
            elif match(pat, t, s) is None:
                return None
        return s

    def _plan(self, items, bound):
        """Order join items statically, cheapest lookups first given the bound variables."""
        bound = set(bound)
        items = list(items)
        steps = []
        while items:
            best = None
            for idx, (what, p) in enumerate(items):
                if what == "fact":
                    lv = _pattern_vars(p.lhs) <= bound
                    rv = _pattern_vars(p.rhs) <= bound
                    if lv and rv:
                        cand = (0, ("check_fact", p))
                    elif lv:
                        cand = (2, ("fact_lhs", p))
                    elif rv and p.rhs is not None:
                        cand = (2, ("fact_rhs", p))
                    else:
                        cand = (4, ("fact_scan", p))
                else:
                    if _pattern_vars(p) <= bound:
                        cand = (0, ("check_in", p))
                    elif p.op == "var":
                        cand = (6, ("in_all", p))
                    else:
                        pos = [i for i, x in enumerate(p.args) if _pattern_vars(x) <= bound]
                        cand = (1, ("in_arg", p, pos[0])) if pos else (5, ("in_op", p))
                if best is None or cand[0] < best[0]:
                    best = (cand[0], cand[1], idx)
            _, step, idx = best
            steps.append(step)
            what, p = items.pop(idx)
            if what == "fact":
                bound |= _fact_vars(p)
            else:
                bound |= _pattern_vars(p)
        return tuple(steps)

    def _exec(self, rule, steps, k, s):
        if k == len(steps):
            self._conclude(rule, s)
            return
        step = steps[k]
        mode, p = step[0], step[1]
        if mode == "check_fact":
            if self._instantiate_fact(p, s) in self.facts:
                self._exec(rule, steps, k + 1, s)
            return
        if mode == "check_in":
            if p.op == "var" or instantiate(p, s) in self.universe:
                self._exec(rule, steps, k + 1, s)
            return
        if mode == "fact_lhs" or mode == "fact_rhs":
            kind = fact_kind(p)
            side = p.lhs if mode == "fact_lhs" else p.rhs
            t = s[side.name] if side.op == "var" else instantiate(side, s)
            if kind is not None and side.op != "var":
                t = self.kb.normalize(t, kind)
            index = self._by_lhs if mode == "fact_lhs" else self._by_rhs
            cands = index.get((p.rel, p.tag, t), ())
        elif mode == "fact_scan":
            cands = self._by_tag.get((p.rel, p.tag), ())
        elif mode == "in_arg":
            i = step[2]
            cands = self._u_by_arg.get((p.op, i, instantiate(p.args[i], s)), ())
        elif mode == "in_op":
            cands = self._u_by_op.get(p.op, ())
        else:
            cands = self._u_list
        is_fact = mode.startswith("fact")
        for c in tuple(cands):
            s2 = self._match_fact(p, c, s) if is_fact else match(p, c, dict(s))
            if s2 is not None:
                self._exec(rule, steps, k + 1, s2)

    # -- conclusions --------------------------------------------------------

    def _instantiate_fact(self, p: Fact, s: dict) -> Fact | None:
        kind = fact_kind(p)
        lhs = s[p.lhs.name] if p.lhs.op == "var" else instantiate(p.lhs, s)
        rhs = p.rhs
        if rhs is not None:
            rhs = s[rhs.name] if rhs.op == "var" else instantiate(rhs, s)
        if kind is not None:
            normalize = self.kb.normalize
            lhs = normalize(lhs, kind)
            if rhs is not None:
                rhs = normalize(rhs, kind)
        return Fact(p.rel, p.tag, lhs, rhs)

    def _conclude(self, rule, s):
        concl = self._instantiate_fact(rule.conclusion, s)
        if concl.rel in ("leM", "nleM") and not (concl.lhs.op == "medv" and concl.rhs.op == "medv"):
            return
        for t in fact_terms(concl):
            if t not in self.universe:
                return
        if concl in self.facts:
            return
        premises = tuple(self._instantiate_fact(p, s) for p in rule.premises)
        subst = tuple(sorted(((k, v) for k, v in s.items()), key=lambda kv: kv[0]))
        self._add(concl, Derivation(rule.name, premises, subst, rule.law))

    # -- queries ------------------------------------------------------------

    def has(self, fact: Fact) -> bool:
        return self.kb.normalize_fact(fact) in self.facts

    def trace(self, fact: Fact) -> ProofTrace:
        fact = self.kb.normalize_fact(fact)
        memo: dict = {}

        def build(f):
            if f in memo:
                return memo[f]
            d = self.facts[f]
            node = ProofTrace(f, d.rule, d.citation)
            memo[f] = node
            node.premises = [build(p) for p in d.premises]
            return node

        return build(fact)

    def fact_set(self) -> frozenset:
        return frozenset(self.facts)

    def sorted_facts(self):
        return sorted(self.facts, key=Fact.sort_key)

    def contradiction_reports(self):
        return [Contradiction(self.trace(p), self.trace(n)) for p, n in self.contradictions]

    def replay(self, fact: Fact) -> bool:
        """Re-validate the single derivation step that produced ``fact``."""
        d = self.facts[fact]
        if d.rule == "given":
            return any(self.kb.normalize_fact(st.fact) == fact
                       for st in self.kb.statements if st.fact is not None)
        rule = RULES_BY_NAME.get(d.rule)
        if rule is None or len(rule.premises) != len(d.premises):
            return False
        s = dict(d.subst)
        for p, actual in zip(rule.premises, d.premises):
            if actual not in self.facts:
                return False
            if self._instantiate_fact(p, s) != actual:
                return False
        for u in rule.universe:
            if u.op != "var" and instantiate(u, s) not in self.universe:
                return False
        if self._instantiate_fact(rule.conclusion, s) != fact:
            return False
        return all(t in self.universe for t in fact_terms(fact))

    def replay_all(self):
        """Facts whose derivation step fails to replay (empty when sound)."""
        return [f for f in self.facts if not self.replay(f)]


def close(kb: KnowledgeBase, depth: int = 1, extra_terms=()) -> Closure:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return Closure(kb, depth, extra_terms)


def check_consistency(kb_or_closure, depth: int = 1):
    cl = kb_or_closure if isinstance(kb_or_closure, Closure) else close(kb_or_closure, depth)
    return cl.contradiction_reports()


# ---------------------------------------------------------------------------
# query interface


class QueryResult(NamedTuple):
    answer: str  # YES, NO, UNKNOWN
    trace: ProofTrace | None
    closure: Closure

    def __str__(self):
        return self.answer


def _ensure(kb_or_closure, terms, depth):
    if isinstance(kb_or_closure, Closure):
        cl = kb_or_closure
        if all(t in cl.universe for t in terms):
            return cl
        kb = cl.kb
        depth = cl.depth
        extra = cl.extra_terms
    else:
        kb = kb_or_closure
        extra = ()
    return close(kb, depth, tuple(extra) + tuple(terms))


def _answer(cl: Closure, fact: Fact) -> QueryResult:
    fact = cl.kb.normalize_fact(fact)
    if fact in cl.facts:
        return QueryResult("YES", cl.trace(fact), cl)
    neg = fact.negation()
    if neg in cl.facts:
        return QueryResult("NO", cl.trace(neg), cl)
    return QueryResult("UNKNOWN", None, cl)


def query(kb_or_closure, rel: str, kind: Kind, t1: Term, t2: Term, depth: int = 1) -> QueryResult:
    """Answer ``le``/``nle`` questions; YES means the stated fact is derivable."""
    if rel not in ("le", "nle"):
        raise ValueError("relation must be le or nle")
    base = Fact(rel, kind, t1, t2)
    kb = kb_or_closure.kb if isinstance(kb_or_closure, Closure) else kb_or_closure
    nf = kb.normalize_fact(base)
    cl = _ensure(kb_or_closure, [t1, t2, nf.lhs, nf.rhs], depth)
    return _answer(cl, base)


def query_prop(kb_or_closure, flag: str, t: Term, depth: int = 1) -> QueryResult:
    if flag not in FLAGS:
        raise ValueError(f"unknown flag {flag!r}")
    base = Fact("prop", flag, t)
    kb = kb_or_closure.kb if isinstance(kb_or_closure, Closure) else kb_or_closure
    nf = kb.normalize_fact(base)
    cl = _ensure(kb_or_closure, [t, nf.lhs], depth)
    return _answer(cl, base)


def query_equiv(kb_or_closure, kind: Kind, t1: Term, t2: Term, depth: int = 1):
    """Equivalence is the conjunction of both reductions."""
    a = query(kb_or_closure, "le", kind, t1, t2, depth)
    b = query(a.closure, "le", kind, t2, t1, depth)
    if a.answer == "YES" and b.answer == "YES":
        return "YES", [a.trace, b.trace]
    if a.answer == "NO" or b.answer == "NO":
        return "NO", [r.trace for r in (a, b) if r.answer == "NO"]
    return "UNKNOWN", []


def explain(trace: ProofTrace) -> str:
    """Indented derivation tree, one conclusion per line."""
    lines = []
    seen: set = set()

    def walk(node, indent):
        pad = "  " * indent
        if node.rule == "given":
            lines.append(f"{pad}{node.conclusion}  [given: {node.citation}]")
            return
        label = f"{node.rule}: {node.citation}"
        if id(node) in seen:
            lines.append(f"{pad}{node.conclusion}  [{node.rule}, shown above]")
            return
        seen.add(id(node))
        lines.append(f"{pad}{node.conclusion}  [{label}]")
        for p in node.premises:
            walk(p, indent + 1)

    walk(trace, 0)
    return "\n".join(lines)


__all__ = [
    "InferenceRule", "RULES", "inference_rules", "rule_families", "lookup_rule",
    "Closure", "close", "check_consistency", "query", "query_prop", "query_equiv",
    "explain", "ProofTrace", "Contradiction", "ContradictionError", "QueryResult",
    "KBError",
]
