"""Kind-indexed rewriting of degree expressions to canonical form."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .terms import (
    INF,
    ONE,
    ZERO,
    Kind,
    Term,
    kind_implies,
    var,
)

DEFAULT_STEP_BOUND = 10_000

# Operators under which a TW-only equivalence may be applied: each of them maps
# TW-equivalent arguments to TW-equivalent results.
TW_CONGRUENT = frozenset(("coprod", "boxsum", "sum", "comp"))


class RewriteError(RuntimeError):
    pass


class GuardOracle:
    """Source of side-condition facts.  The default knows nothing."""

    def guard_prop(self, flag: str, term: Term) -> bool:
        return False

    def guard_nle(self, kind: Kind, lhs: Term, rhs: Term) -> bool:
        return False


NO_FACTS = GuardOracle()


def known_not_top(t: Term, oracle: GuardOracle) -> bool:
    """t is known to differ from INF."""
    if t.op in ("0", "1"):
        return True
    return oracle.guard_nle(Kind.W, INF, t)


def known_not_zero(t: Term, oracle: GuardOracle) -> bool:
    """t is known not to be W-equivalent to 0."""
    if t.op in ("1", "INF"):
        return True
    return oracle.guard_nle(Kind.W, t, ZERO)


def is_medvedev_image(t: Term) -> bool:
    if t.op == "medv":
        return True
    if t.op in ("meet", "prod", "mimp"):
        return all(is_medvedev_image(a) for a in t.args)
    return False


def has_prop(flag: str, t: Term, oracle: GuardOracle) -> bool:
    if oracle.guard_prop(flag, t):
        return True
    if flag == "complete":
        return oracle.guard_prop("stronglyComplete", t)
    return False


@dataclass(frozen=True)
class Guard:
    kind: str  # "prop", "not_top", "not_zero", "medv"
    variable: str
    flag: str = ""

    def holds(self, subst: dict, oracle: GuardOracle) -> bool:
        t = subst[self.variable]
        if self.kind == "prop":
            return has_prop(self.flag, t, oracle)
        if self.kind == "not_top":
            return known_not_top(t, oracle)
        if self.kind == "not_zero":
            return known_not_zero(t, oracle)
        if self.kind == "medv":
            return is_medvedev_image(t)
        raise ValueError(self.kind)

    def __str__(self):
        if self.kind == "prop":
            return f"{self.flag}({self.variable})"
        if self.kind == "not_top":
            return f"{self.variable} is not INF"
        if self.kind == "not_zero":
            return f"{self.variable} not W-equivalent to 0"
        return f"{self.variable} is a Medvedev image"


@dataclass(frozen=True)
class RewriteRule:
    name: str
    family: str
    lhs: Term
    rhs: Term
    kind_tag: Kind
    law: str
    guards: tuple = ()
    congruent_everywhere: bool = True

    def fires_at(self, kind: Kind) -> bool:
        return kind_implies(self.kind_tag, kind)

    def __str__(self):
        text = f"{self.name} [{self.kind_tag}] {self.lhs} => {self.rhs}"
        if self.guards:
            text += "  if " + ", ".join(str(g) for g in self.guards)
        return text


def _vars(t: Term) -> set:
    return {s.name for s in t.subterms() if s.op == "var"}


def match(pattern: Term, t: Term, subst: dict | None = None):
    """Syntactic matching; returns a substitution dict or None."""
    if subst is None:
        subst = {}
    if pattern.op == "var":
        bound = subst.get(pattern.name)
        if bound is None:
            subst[pattern.name] = t
            return subst
        return subst if bound is t else None
    if pattern.op != t.op or pattern.name != t.name:
        return None
    for p, a in zip(pattern.args, t.args):
        if match(p, a, subst) is None:
            return None
    return subst


def instantiate(pattern: Term, subst: dict) -> Term:
    if pattern.op == "var":
        return subst[pattern.name]
    if not pattern.args:
        return pattern
    return pattern.replace_args(instantiate(a, subst) for a in pattern.args)


# ---------------------------------------------------------------------------
# catalog

f, g, h = var("f"), var("g"), var("h")


def _t(op, *args):
    return Term(op, tuple(args))


def comp(x):
    return _t("comp", x)


def par(x):
    return _t("par", x)


def _build_rules():
    SW, W, TW = Kind.SW, Kind.W, Kind.TW
    rules = []

    def add(name, family, lhs, rhs, tag, law, guards=(), congruent=True):
        rules.append(RewriteRule(name, family, lhs, rhs, tag, law, tuple(guards), congruent))

    closure = "completion is a closure operator (idempotent)"
    add("R1", "R1", comp(comp(f)), comp(f), SW, closure)
    add("R2", "R2", par(par(f)), par(f), SW, "parallelization is a closure operator (idempotent)")
    add("R3", "R3", par(comp(par(comp(f)))), par(comp(f)), W,
        "completion followed by parallelization is a closure operator")
    add("R4", "R4", _t("fpar", _t("fpar", f)), _t("fpar", f), SW,
        "finite parallelization is idempotent on pointed problems",
        [Guard("prop", "f", "pointed")])
    add("R5", "R5", comp(_t("coprod", f, g)), _t("coprod", comp(f), comp(g)), W,
        "completion commutes with coproduct up to W-equivalence")
    add("R6", "R6", comp(_t("boxsum", f, g)), _t("boxsum", comp(f), comp(g)), SW,
        "completion commutes with box sum up to SW-equivalence")
    add("R7", "R7", comp(_t("sum", f, g)), _t("sum", comp(f), comp(g)), SW,
        "completion commutes with sum up to SW-equivalence")
    add("R8", "R8", par(_t("prod", f, g)), _t("prod", par(f), par(g)), SW,
        "parallelization distributes over product")
    add("R9", "R9", _t("prod", par(comp(f)), par(comp(g))), par(comp(_t("coprod", f, g))), W,
        "product of parallelized completions is the parallelized completion of the coproduct")
    top = "INF is an attached top element"
    add("R10a", "R10", _t("meet", f, INF), f, SW, top + ": meet with INF")
    add("R10b", "R10", _t("meet", INF, f), f, SW, top + ": meet with INF")
    add("R10c", "R10", _t("coprod", f, INF), INF, SW, top + ": coproduct with INF")
    add("R10d", "R10", _t("coprod", INF, f), INF, SW, top + ": coproduct with INF")
    add("R10e", "R10", _t("prod", f, INF), INF, SW, top + ": product with INF")
    add("R10f", "R10", _t("prod", INF, f), INF, SW, top + ": product with INF")
    add("R10g", "R10", _t("sum", f, INF), f, SW, top + ": sum with INF")
    add("R10h", "R10", _t("sum", INF, f), f, SW, top + ": sum with INF")
    add("R11a", "R11", comp(INF), INF, SW, "closure operators fix INF")
    add("R11b", "R11", par(INF), INF, SW, "closure operators fix INF")
    add("R11c", "R11", _t("fpar", INF), INF, SW, "closure operators fix INF")
    add("R12a", "R12", _t("star", f, INF), INF, SW, "compositional product with INF is INF")
    add("R12b", "R12", _t("star", INF, f), INF, SW, "compositional product with INF is INF")
    imp = "implications at the constants"
    for op in ("cimp", "mimp"):
        suffix = "c" if op == "cimp" else "m"
        add(f"R13{suffix}1", "R13", _t(op, g, ZERO), ZERO, W, imp + ": anything implies 0")
        add(f"R13{suffix}2", "R13", _t(op, ZERO, f), INF, W, imp + ": 0 implies only INF",
            [Guard("not_zero", "f")])
        add(f"R13{suffix}3", "R13", _t(op, INF, f), ZERO, W, imp + ": INF implies everything")
        add(f"R13{suffix}4", "R13", _t(op, g, INF), INF, W, imp + ": only INF implies INF",
            [Guard("not_top", "g")])
    add("R14a", "R14", _t("neg", f), INF, W, "negation of a problem other than INF",
        [Guard("not_top", "f")])
    add("R14b", "R14", _t("neg", INF), ZERO, W, "negation of INF is 0")
    add("R15a", "R15", comp(f), f, W, "a complete problem is W-equivalent to its completion",
        [Guard("prop", "f", "complete")])
    add("R15b", "R15", comp(f), f, SW,
        "a strongly complete problem is SW-equivalent to its completion",
        [Guard("prop", "f", "stronglyComplete")])
    med = "constant problems embed the Medvedev lattice"
    add("R16a", "R16", _t("otimes", f, g), _t("meet", f, g), SW, med + ": sum of mass problems is meet")
    add("R16b", "R16", _t("oplus", f, g), _t("prod", f, g), SW, med + ": join of mass problems is product")
    add("R16c", "R16", _t("mimpM", f, g), _t("mimp", f, g), W,
        med + ": Medvedev implication is multiplicative implication")
    add("R16d", "R16", _t("star", f, g), _t("prod", f, g), W,
        med + ": compositional product of constant problems is their product",
        [Guard("medv", "f"), Guard("medv", "g")])
    add("R16e", "R16", _t("cimp", f, g), _t("mimp", f, g), W,
        med + ": compositional and multiplicative implication agree on constant problems",
        [Guard("medv", "f"), Guard("medv", "g")])
    dist = "the total Weihrauch lattice is distributive"
    add("R17a", "R17",
        _t("meet", comp(f), _t("coprod", comp(g), comp(h))),
        _t("coprod", _t("meet", comp(f), comp(g)), _t("meet", comp(f), comp(h))),
        TW, dist + ": completed meet distributes over coproduct")
    add("R17b", "R17",
        _t("coprod", f, _t("meet", comp(g), comp(h))),
        _t("meet", _t("coprod", comp(f), comp(g)), _t("coprod", comp(f), comp(h))),
        TW, dist + ": coproduct distributes over completed meet", congruent=False)
    for r in rules:
        if not _vars(r.rhs) <= _vars(r.lhs):
            raise AssertionError(f"{r.name}: rhs variables not bound by lhs")
        for gd in r.guards:
            if gd.variable not in _vars(r.lhs):
                raise AssertionError(f"{r.name}: guard variable not bound by lhs")
    return tuple(rules)


RULES = _build_rules()
_RULES_BY_OP: dict = {}
for _r in RULES:
    _RULES_BY_OP.setdefault(_r.lhs.op, []).append(_r)


def rule_set():
    """The rewrite catalog, in application priority order."""
    return list(RULES)


def rule_families():
    out = {}
    for r in RULES:
        out.setdefault(r.family, []).append(r)
    return out


def lookup_rule(name: str):
    """Find a rule by name, or the first rule of a family."""
    for r in RULES:
        if r.name == name:
            return r
    for r in RULES:
        if r.family == name:
            return r
    raise KeyError(name)


# ---------------------------------------------------------------------------
# normalization


class Normalizer:
    """Innermost rewriting to a fixpoint, with per-instance memoization.

    ``rng`` switches to a randomized rule order (used to probe confluence).
    """

    def __init__(self, oracle: GuardOracle = NO_FACTS, step_bound: int = DEFAULT_STEP_BOUND,
                 rng: random.Random | None = None):
        self.oracle = oracle
        self.step_bound = step_bound
        self.rng = rng
        self.steps = 0
        self._memo: dict = {}
        self.log: list | None = None

    def normalize(self, t: Term, kind: Kind) -> Term:
        self.steps = 0
        return self._norm(t, kind, True)

    def _norm(self, t: Term, kind: Kind, open_ctx: bool) -> Term:
        key = (t, kind, open_ctx)
        cached = self._memo.get(key) if self.rng is None else None
        if cached is not None:
            return cached
        if t.args:
            child_ctx = open_ctx and t.op in TW_CONGRUENT
            args = tuple(self._norm(a, kind, child_ctx) for a in t.args)
            cur = t.replace_args(args) if args != t.args else t
        else:
            cur = t
        fired = self._apply_root(cur, kind, open_ctx)
        if fired is not None:
            rule, result = fired
            self.steps += 1
            if self.steps > self.step_bound:
                raise RewriteError(
                    f"step bound {self.step_bound} exceeded while normalizing {t}"
                )
            if self.log is not None:
                self.log.append((rule.name, cur, result))
            cur = self._norm(result, kind, open_ctx)
        if self.rng is None:
            self._memo[key] = cur
        return cur

    def _apply_root(self, t: Term, kind: Kind, open_ctx: bool):
        candidates = _RULES_BY_OP.get(t.op, ())
        if self.rng is not None and len(candidates) > 1:
            candidates = list(candidates)
            self.rng.shuffle(candidates)
        for rule in candidates:
            if not rule.fires_at(kind):
                continue
            if not rule.congruent_everywhere and not open_ctx:
                continue
            subst = match(rule.lhs, t)
            if subst is None:
                continue
            if all(gd.holds(subst, self.oracle) for gd in rule.guards):
                return rule, instantiate(rule.rhs, subst)
        return None


def normalize(t: Term, kind: Kind, kb=None, step_bound: int = DEFAULT_STEP_BOUND) -> Term:
    """Canonical representative of t modulo the rules valid at ``kind``."""
    oracle = kb if kb is not None else NO_FACTS
    if hasattr(oracle, "normalizer") and step_bound == DEFAULT_STEP_BOUND:
        return oracle.normalizer.normalize(t, kind)
    return Normalizer(oracle, step_bound).normalize(t, kind)


def equivalent(t1: Term, t2: Term, kind: Kind, kb=None) -> bool:
    """True when both terms reach the same normal form.  False is not a disproof."""
    return normalize(t1, kind, kb) is normalize(t2, kind, kb)


def rewrite_trace(t: Term, kind: Kind, kb=None):
    """Normalize while recording (rule, before, after) steps."""
    oracle = kb if kb is not None else NO_FACTS
    n = Normalizer(oracle)
    n.log = []
    result = n.normalize(t, kind)
    return result, n.log


__all__ = [
    "RewriteError", "RewriteRule", "Guard", "GuardOracle", "Normalizer", "RULES",
    "rule_set", "rule_families", "lookup_rule", "normalize", "equivalent",
    "rewrite_trace", "match", "instantiate", "ONE", "ZERO", "INF",
]
