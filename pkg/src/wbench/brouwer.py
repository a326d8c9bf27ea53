"""Finite preorders, lattices and algebras; closure operators; finite validity.

Orientation follows the degree ordering: in a Brouwer algebra the unit 1 is
the bottom element, the monoid operation is the join, and a formula is valid
when every valuation sends it to the bottom.  Disjunction is interpreted by
the lattice meet and conjunction by the join.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

MAX_POSET = 6
MAX_CARRIER = 32
MAX_VARIABLES = 4


# ---------------------------------------------------------------------------
# preorders and lattices


class FinitePreorder:
    """Carrier labels plus a reflexive, transitive boolean matrix."""

    def __init__(self, carrier, leq):
        self.carrier = tuple(carrier)
        n = len(self.carrier)
        if len(set(self.carrier)) != n:
            raise ValueError("carrier labels must be distinct")
        self.leq = tuple(tuple(bool(x) for x in row) for row in leq)
        if len(self.leq) != n or any(len(r) != n for r in self.leq):
            raise ValueError("leq must be a square matrix over the carrier")
        self.index = {x: i for i, x in enumerate(self.carrier)}
        for i in range(n):
            if not self.leq[i][i]:
                raise ValueError(f"leq is not reflexive at {self.carrier[i]!r}")
        for i, j, k in itertools.product(range(n), repeat=3):
            if self.leq[i][j] and self.leq[j][k] and not self.leq[i][k]:
                c = self.carrier
                raise ValueError(f"leq is not transitive at {c[i]!r} <= {c[j]!r} <= {c[k]!r}")

    @classmethod
    def from_relation(cls, carrier, pairs):
        """Reflexive-transitive closure of a set of (x, y) pairs meaning x <= y."""
        carrier = tuple(carrier)
        n = len(carrier)
        idx = {x: i for i, x in enumerate(carrier)}
        m = np.eye(n, dtype=bool)
        for x, y in pairs:
            m[idx[x], idx[y]] = True
        for k in range(n):
            m |= np.outer(m[:, k], m[k, :])
        return cls(carrier, m.tolist())

    def __len__(self):
        return len(self.carrier)

    def le(self, x, y) -> bool:
        return self.leq[self.index[x]][self.index[y]]

    def is_antisymmetric(self) -> bool:
        n = len(self)
        return all(not (self.leq[i][j] and self.leq[j][i]) or i == j
                   for i in range(n) for j in range(n))

    def matrix(self) -> np.ndarray:
        return np.array(self.leq, dtype=bool)


def _bound(leq, n, i, j, upper: bool):
    """Index of the least upper (greatest lower) bound of i and j, or None."""
    if upper:
        cands = [k for k in range(n) if leq[i][k] and leq[j][k]]
        best = [k for k in cands if all(leq[k][m] for m in cands)]
    else:
        cands = [k for k in range(n) if leq[k][i] and leq[k][j]]
        best = [k for k in cands if all(leq[m][k] for m in cands)]
    return best[0] if best else None


class FiniteLattice:
    """A partial order with total meet and join tables (stored by index)."""

    def __init__(self, preorder: FinitePreorder, meet=None, join=None):
        if not preorder.is_antisymmetric():
            raise ValueError("a lattice needs an antisymmetric order")
        self.preorder = preorder
        n = len(preorder)
        leq = preorder.leq
        if n == 0:
            raise ValueError("empty carrier")
        if meet is None or join is None:
            meet = [[None] * n for _ in range(n)]
            join = [[None] * n for _ in range(n)]
            for i, j in itertools.product(range(n), repeat=2):
                meet[i][j] = _bound(leq, n, i, j, upper=False)
                join[i][j] = _bound(leq, n, i, j, upper=True)
                if meet[i][j] is None or join[i][j] is None:
                    c = preorder.carrier
                    what = "meet" if meet[i][j] is None else "join"
                    raise ValueError(f"no {what} of {c[i]!r} and {c[j]!r}")
        self.meet = tuple(tuple(r) for r in meet)
        self.join = tuple(tuple(r) for r in join)
        bottoms = [i for i in range(n) if all(leq[i][j] for j in range(n))]
        tops = [i for i in range(n) if all(leq[j][i] for j in range(n))]
        if not bottoms or not tops:
            raise ValueError("lattice is not bounded")
        self.bottom, self.top = bottoms[0], tops[0]
        problem = self.lattice_violation()
        if problem:
            raise ValueError(problem)

    @classmethod
    def from_order(cls, carrier, leq):
        return cls(FinitePreorder(carrier, leq))

    @property
    def carrier(self):
        return self.preorder.carrier

    @property
    def leq(self):
        return self.preorder.leq

    def __len__(self):
        return len(self.preorder)

    def label(self, i):
        return self.preorder.carrier[i]

    def lattice_violation(self):
        """First failure of the bound or absorption laws, or None."""
        n, leq, m, j = len(self), self.leq, self.meet, self.join
        for a, b in itertools.product(range(n), repeat=2):
            x, y = m[a][b], j[a][b]
            if not (leq[x][a] and leq[x][b]):
                return f"meet({self.label(a)},{self.label(b)}) is not a lower bound"
            if not (leq[a][y] and leq[b][y]):
                return f"join({self.label(a)},{self.label(b)}) is not an upper bound"
            for c in range(n):
                if leq[c][a] and leq[c][b] and not leq[c][x]:
                    return f"meet({self.label(a)},{self.label(b)}) is not greatest"
                if leq[a][c] and leq[b][c] and not leq[y][c]:
                    return f"join({self.label(a)},{self.label(b)}) is not least"
            if m[a][j[a][b]] != a or j[a][m[a][b]] != a:
                return f"absorption fails at {self.label(a)},{self.label(b)}"
        return None

    def is_distributive(self) -> bool:
        n, m, j = len(self), self.meet, self.join
        return all(m[a][j[b][c]] == j[m[a][b]][m[a][c]]
                   for a, b, c in itertools.product(range(n), repeat=3))


# ---------------------------------------------------------------------------
# closure operators


def _as_index_map(P: FinitePreorder, c):
    """Accept a dict over labels, or a sequence of labels indexed like the carrier."""
    if isinstance(c, dict):
        missing = [x for x in P.carrier if x not in c]
        if missing:
            raise ValueError(f"closure map undefined at {missing[0]!r}")
        return tuple(P.index[c[x]] for x in P.carrier)
    c = tuple(c)
    if len(c) != len(P):
        raise ValueError("closure map must be total on the carrier")
    return tuple(P.index[y] for y in c)


def _labels(P, cidx):
    return {P.carrier[i]: P.carrier[v] for i, v in enumerate(cidx)}


class ClosureReport(NamedTuple):
    ok: bool
    axiom: int | None  # 1 extensive, 2 idempotent, 3 monotone
    witness: tuple  # offending elements

    def __str__(self):
        if self.ok:
            return "closure operator"
        names = {1: "x <= c(x)", 2: "cc(x) <= c(x)", 3: "monotonicity"}
        return f"violates axiom ({self.axiom}) {names[self.axiom]} at {', '.join(map(str, self.witness))}"


def check_closure_operator(P: FinitePreorder, c) -> ClosureReport:
    ci = _as_index_map(P, c)
    n, leq, lab = len(P), P.leq, P.carrier
    for x in range(n):
        if not leq[x][ci[x]]:
            return ClosureReport(False, 1, (lab[x],))
    for x in range(n):
        if not leq[ci[ci[x]]][ci[x]]:
            return ClosureReport(False, 2, (lab[x],))
    for x, y in itertools.product(range(n), repeat=2):
        if leq[x][y] and not leq[ci[x]][ci[y]]:
            return ClosureReport(False, 3, (lab[x], lab[y]))
    return ClosureReport(True, None, ())


def _require_closure(P, c):
    rep = check_closure_operator(P, c)
    if not rep.ok:
        raise ValueError(f"not a closure operator: {rep}")
    return _as_index_map(P, c)


def induced_preorder(P: FinitePreorder, c) -> FinitePreorder:
    """x <=_c y iff x <= c(y)."""
    ci = _require_closure(P, c)
    n = len(P)
    m = [[P.leq[x][ci[y]] for y in range(n)] for x in range(n)]
    Q = FinitePreorder(P.carrier, m)
    for x, y in itertools.product(range(n), repeat=2):
        if P.leq[x][y] and not m[x][y]:
            raise AssertionError("induced preorder does not extend the original")
    return Q


def closure_classes(P: FinitePreorder, c):
    """Equivalence classes of the induced preorder, as tuples of indices."""
    Q = induced_preorder(P, c)
    n = len(P)
    seen, classes = set(), []
    for x in range(n):
        if x in seen:
            continue
        cls = tuple(y for y in range(n) if Q.leq[x][y] and Q.leq[y][x])
        seen.update(cls)
        classes.append(cls)
    return Q, classes


def _class_label(P, cls):
    return "|".join(str(P.carrier[i]) for i in cls)


def quotient_lattice(L: FiniteLattice, c) -> FiniteLattice:
    """Lattice of closure classes: meet through c, join as in L."""
    P = L.preorder
    ci = _require_closure(P, c)
    Q, classes = closure_classes(P, c)
    which = {}
    for k, cls in enumerate(classes):
        for i in cls:
            which[i] = k
    k = len(classes)
    leq = [[Q.leq[classes[a][0]][classes[b][0]] for b in range(k)] for a in range(k)]
    meet = [[which[L.meet[ci[classes[a][0]]][ci[classes[b][0]]]] for b in range(k)]
            for a in range(k)]
    join = [[which[L.join[classes[a][0]][classes[b][0]]] for b in range(k)] for a in range(k)]
    carrier = [_class_label(P, cls) for cls in classes]
    return FiniteLattice(FinitePreorder(carrier, leq), meet, join)


class PreservationReport(NamedTuple):
    preserved: bool
    coPreserved: bool


def check_preservation(P: FinitePreorder, c, box) -> PreservationReport:
    """``box`` is a table indexed by carrier positions or a function on labels."""
    ci = _as_index_map(P, c)
    n, leq = len(P), P.leq
    if callable(box):
        tab = [[P.index[box(P.carrier[x], P.carrier[y])] for y in range(n)] for x in range(n)]
    else:
        tab = box
    pres = copres = True
    for x, y in itertools.product(range(n), repeat=2):
        lhs, rhs = ci[tab[x][y]], tab[ci[x]][ci[y]]
        pres = pres and leq[lhs][rhs]
        copres = copres and leq[rhs][lhs]
    return PreservationReport(pres, copres)


def preserved_by(P: FinitePreorder, c, c2) -> bool:
    """c(c2(x)) <= c2(c(x)) for all x."""
    a, b = _as_index_map(P, c), _as_index_map(P, c2)
    return all(P.leq[a[b[x]]][b[a[x]]] for x in range(len(P)))


def lift_operation(P: FinitePreorder, c, box):
    """The table (x, y) -> c(x) box c(y)."""
    ci = _as_index_map(P, c)
    n = len(P)
    return [[box[ci[x]][ci[y]] for y in range(n)] for x in range(n)]


def closure_from_closed_set(L: FiniteLattice, closed) -> tuple:
    """c(x) = meet of the closed elements above x; top is always added."""
    K = set(closed) | {L.top}
    out = []
    for x in range(len(L)):
        m = L.top
        for k in K:
            if L.leq[x][k]:
                m = L.meet[m][k]
        out.append(m)
    return tuple(out)


# ---------------------------------------------------------------------------
# algebras


class FiniteAlgebra:
    """Bounded lattice with a monoid operation ``dot`` (unit ``one``) and an implication.

    All tables are indexed by carrier position.  ``imp[y][x]`` is y -> x.
    """

    def __init__(self, lattice: FiniteLattice, dot=None, one=None, imp=None):
        self.lattice = lattice
        n = len(lattice)
        self.dot = tuple(tuple(r) for r in (dot if dot is not None else lattice.join))
        self.one = lattice.bottom if one is None else one
        self.imp = None if imp is None else tuple(tuple(r) for r in imp)
        if len(self.dot) != n or any(len(r) != n for r in self.dot):
            raise ValueError("dot table must be total over the carrier")
        if self.imp is not None and (len(self.imp) != n or any(len(r) != n for r in self.imp)):
            raise ValueError("imp table must be total over the carrier")
        self.flags: dict = {}

    def __len__(self):
        return len(self.lattice)

    @property
    def carrier(self):
        return self.lattice.carrier

    @property
    def bottom(self):
        return self.lattice.bottom

    @property
    def top(self):
        return self.lattice.top

    def label(self, i):
        return self.lattice.label(i)

    def with_imp(self, imp) -> "FiniteAlgebra":
        return FiniteAlgebra(self.lattice, self.dot, self.one, imp)

    def implication(self):
        """The given implication table, else the co-residual of ``dot``; None if absent."""
        if self.imp is not None:
            return self.imp
        res = co_residual(self.lattice, self.dot)
        return res.table if res.ok else None


def brouwer_from_lattice(L: FiniteLattice) -> FiniteAlgebra:
    """dot = join, one = bottom, imp = co-residual of join (must exist)."""
    res = co_residual(L, L.join)
    if not res.ok:
        raise ValueError(f"join has no co-residual: {res.witness}")
    return FiniteAlgebra(L, L.join, L.bottom, res.table)


def _upsets(P: FinitePreorder):
    n = len(P)
    out = []
    for mask in range(1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        if all(mask >> j & 1 for i in members for j in range(n) if P.leq[i][j]):
            out.append(mask)
    return out


def upset_lattice(P: FinitePreorder) -> FiniteLattice:
    """Up-sets under reverse inclusion: the full set is the bottom, the empty set the top."""
    if len(P) > MAX_POSET:
        raise ValueError(f"poset too large for the up-set construction (max {MAX_POSET})")
    ups = _upsets(P)
    ups.sort(key=lambda m: (-bin(m).count("1"), m))
    pos = {m: i for i, m in enumerate(ups)}
    k = len(ups)
    leq = [[(b & a) == b for b in ups] for a in ups]  # a <= b iff b is a subset of a
    meet = [[pos[a | b] for b in ups] for a in ups]
    join = [[pos[a & b] for b in ups] for a in ups]

    def lab(m):
        return "{" + ",".join(str(P.carrier[i]) for i in range(len(P)) if m >> i & 1) + "}"

    carrier = [lab(m) for m in ups]
    L = FiniteLattice(FinitePreorder(carrier, leq), meet, join)
    assert L.bottom == 0 and L.top == k - 1
    return L


def upset_algebra(P: FinitePreorder) -> FiniteAlgebra:
    return brouwer_from_lattice(upset_lattice(P))


def chain_poset(n: int) -> FinitePreorder:
    return FinitePreorder(range(n), [[i <= j for j in range(n)] for i in range(n)])


def antichain_poset(n: int) -> FinitePreorder:
    return FinitePreorder(range(n), [[i == j for j in range(n)] for i in range(n)])


def v_poset() -> FinitePreorder:
    """One bottom element below two incomparable maximal elements."""
    return FinitePreorder.from_relation(("b", "l", "r"), [("b", "l"), ("b", "r")])


def chain_lattice(n: int) -> FiniteLattice:
    return FiniteLattice(chain_poset(n))


def chain_algebra(n: int) -> FiniteAlgebra:
    """n-element chain 0 < 1 < ... < n-1 as a Brouwer algebra (0 is the unit)."""
    return brouwer_from_lattice(chain_lattice(n))


def diamond_m3() -> FiniteLattice:
    return FiniteLattice(FinitePreorder.from_relation(
        ("0", "a", "b", "c", "1"),
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")]))


def pentagon_n5() -> FiniteLattice:
    return FiniteLattice(FinitePreorder.from_relation(
        ("0", "a", "b", "c", "1"),
        [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")]))


def natural_posets(n: int):
    """Every partial order on 0..n-1 whose strict part respects the integer order.

    Every finite poset is isomorphic to at least one of these (take a linear extension).
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for mask in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if mask >> k & 1}
        if all((i, k) in rel for (i, j) in rel for (j2, k) in rel if j == j2):
            yield FinitePreorder(range(n), [[i == j or (i, j) in rel for j in range(n)]
                                            for i in range(n)])


def random_poset(rng: random.Random, n: int, density: float = 0.4) -> FinitePreorder:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return FinitePreorder.from_relation(range(n), pairs)


# ---------------------------------------------------------------------------
# co-residuation and the algebra checker


@dataclass
class CoResidual:
    ok: bool
    table: tuple | None = None
    witness: tuple | None = None  # labels of the offending configuration

    def __bool__(self):
        return self.ok


def co_residual(L: FiniteLattice, dot) -> CoResidual:
    """imp[y][x] = least z with x <= y.z, checked against the full biconditional."""
    n, leq = len(L), L.leq
    table = [[None] * n for _ in range(n)]
    for y, x in itertools.product(range(n), repeat=2):
        cands = [z for z in range(n) if leq[x][dot[y][z]]]
        least = [z for z in cands if all(leq[z][w] for w in cands)]
        if not least:
            mins = [z for z in cands if not any(leq[w][z] and w != z for w in cands)]
            return CoResidual(False, None, ("no least solution", L.label(y), L.label(x),
                                            tuple(L.label(z) for z in mins)))
        table[y][x] = least[0]
    for x, y, z in itertools.product(range(n), repeat=3):
        if leq[x][dot[y][z]] != leq[table[y][x]][z]:
            return CoResidual(False, None, ("biconditional fails", L.label(x), L.label(y),
                                            L.label(z)))
    return CoResidual(True, tuple(tuple(r) for r in table), None)


@dataclass
class AlgebraReport:
    checks: dict = field(default_factory=dict)  # name -> None or failure text
    flags: dict = field(default_factory=dict)
    classification: str = "none"

    @property
    def weihrauch(self) -> bool:
        return self.classification in ("Weihrauch", "Troelstra", "Brouwer")

    @property
    def troelstra(self) -> bool:
        return self.classification in ("Troelstra", "Brouwer")

    @property
    def brouwer(self) -> bool:
        return self.classification == "Brouwer"

    def failures(self):
        return {k: v for k, v in self.checks.items() if v is not None}

    def __str__(self):
        lines = [f"classification: {self.classification}"]
        lines += [f"{k}: {'ok' if v is None else v}" for k, v in self.checks.items()]
        lines.append("flags: " + ", ".join(f"{k}={v}" for k, v in self.flags.items()))
        return "\n".join(lines)


def check_weihrauch_algebra(A: FiniteAlgebra) -> AlgebraReport:
    L = A.lattice
    n, leq, d, lab = len(L), L.leq, A.dot, L.label
    rep = AlgebraReport()
    rep.checks["lattice"] = L.lattice_violation()

    def first(gen):
        for item in gen:
            return item
        return None

    assoc = first((a, b, c) for a, b, c in itertools.product(range(n), repeat=3)
                  if d[d[a][b]][c] != d[a][d[b][c]])
    unit = first(a for a in range(n) if d[A.one][a] != a or d[a][A.one] != a)
    monoid = None
    if assoc is not None:
        monoid = "not associative at " + ",".join(str(lab(i)) for i in assoc)
    elif unit is not None:
        monoid = f"{lab(A.one)} is not a unit at {lab(unit)}"
    rep.checks["monoid"] = monoid
    mono = first((a, b, c) for a, b, c in itertools.product(range(n), repeat=3)
                 if leq[a][b] and not (leq[d[a][c]][d[b][c]] and leq[d[c][a]][d[c][b]]))
    rep.checks["dot monotone"] = None if mono is None else \
        "dot not monotone at " + ",".join(str(lab(i)) for i in mono)
    imp = A.imp
    if imp is None:
        res = co_residual(L, d)
        if res.ok:
            imp = res.table
        else:
            rep.checks["implication exists"] = "no co-residual: " + " ".join(map(str, res.witness))
    if imp is not None:
        bad = first((a, b, c) for a, b, c in itertools.product(range(n), repeat=3)
                    if leq[a][b] and not (leq[imp[b][c]][imp[a][c]] and leq[imp[c][a]][imp[c][b]]))
        rep.checks["imp monotone"] = None if bad is None else \
            "imp not antitone/monotone at " + ",".join(str(lab(i)) for i in bad)
        law = first((x, y, z) for x, y, z in itertools.product(range(n), repeat=3)
                    if leq[x][d[y][z]] and not leq[imp[y][x]][z])
        rep.checks["implication law"] = None if law is None else \
            "x <= y.z but not (y->x) <= z at " + ",".join(str(lab(i)) for i in law)
        rep.flags["deductive"] = all(
            leq[x][d[y][z]] == leq[imp[y][x]][z]
            for x, y, z in itertools.product(range(n), repeat=3))
    else:
        rep.flags["deductive"] = False
    rep.flags["commutative"] = all(d[a][b] == d[b][a] for a in range(n) for b in range(n))
    rep.flags["distributive"] = L.is_distributive()
    if all(v is None for v in rep.checks.values()):
        rep.classification = "Weihrauch"
        if rep.flags["commutative"] and rep.flags["deductive"]:
            rep.classification = "Troelstra"
            if d == L.join and A.one == L.bottom:
                rep.classification = "Brouwer"
    return rep


class EmbeddingReport(NamedTuple):
    ok: bool
    failures: tuple


def check_embedding(A: FiniteAlgebra, B: FiniteAlgebra, f) -> EmbeddingReport:
    """Injective, order-reflecting, preserving join, meet, implication, bottom and top."""
    fi = _as_index_map_between(A, B, f)
    n = len(A)
    ia, ib = A.implication(), B.implication()
    la, lb = A.lattice, B.lattice
    fails = []
    if len(set(fi)) != n:
        fails.append("not injective")
    for x, y in itertools.product(range(n), repeat=2):
        if la.leq[x][y] != lb.leq[fi[x]][fi[y]]:
            fails.append(f"order not preserved and reflected at {A.label(x)},{A.label(y)}")
            break
    for name, ta, tb in (("join", la.join, lb.join), ("meet", la.meet, lb.meet), ("imp", ia, ib)):
        if ta is None or tb is None:
            fails.append(f"{name} missing")
            continue
        for x, y in itertools.product(range(n), repeat=2):
            if fi[ta[x][y]] != tb[fi[x]][fi[y]]:
                fails.append(f"{name} not preserved at {A.label(x)},{A.label(y)}")
                break
    if fi[la.bottom] != lb.bottom:
        fails.append("bottom not preserved")
    if fi[la.top] != lb.top:
        fails.append("top not preserved")
    return EmbeddingReport(not fails, tuple(fails))


def _as_index_map_between(A, B, f):
    if isinstance(f, dict):
        return tuple(B.lattice.preorder.index[f[x]] for x in A.carrier)
    return tuple(B.lattice.preorder.index[y] for y in f)


# ---------------------------------------------------------------------------
# propositional formulas


class Var(NamedTuple):
    name: str


class Not(NamedTuple):
    arg: object


class And(NamedTuple):
    left: object
    right: object


class Or(NamedTuple):
    left: object
    right: object


class Imp(NamedTuple):
    left: object
    right: object


class FormulaSyntaxError(ValueError):
    pass


_FTOKEN = re.compile(r"\s*(?:(->)|([&|~()])|([A-Z][A-Za-z0-9_]*))")


def parse_formula(text: str):
    """Variables are capitalized identifiers; ``~`` binds tightest, then ``&``,
    ``|``, and the right-associative ``->``."""
    tokens, pos = [], 0
    text_end = len(text.rstrip())
    while pos < text_end:
        m = _FTOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character at position {pos}")
        tokens.append(m.group(1) or m.group(2) or ("var", m.group(3)))
        pos = m.end()
    tokens.append(None)
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def imp():
        left = disj()
        if peek() == "->":
            take()
            return Imp(left, imp())
        return left

    def disj():
        left = conj()
        while peek() == "|":
            take()
            left = Or(left, conj())
        return left

    def conj():
        left = unary()
        while peek() == "&":
            take()
            left = And(left, unary())
        return left

    def unary():
        tok = take()
        if tok == "~":
            return Not(unary())
        if tok == "(":
            inner = imp()
            if take() != ")":
                raise FormulaSyntaxError("expected ')'")
            return inner
        if isinstance(tok, tuple):
            return Var(tok[1])
        raise FormulaSyntaxError(f"unexpected {tok or 'end of input'!r}")

    out = imp()
    if peek() is not None:
        raise FormulaSyntaxError(f"trailing input {peek()!r}")
    return out


def formula_vars(phi) -> list:
    out: dict = {}

    def walk(p):
        if isinstance(p, Var):
            out.setdefault(p.name, None)
        else:
            for a in p:
                walk(a)

    walk(phi)
    return list(out)


def format_formula(phi) -> str:
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Not):
        return "~" + format_formula(phi.arg)
    sym = {And: "&", Or: "|", Imp: "->"}[type(phi)]
    return f"({format_formula(phi.left)} {sym} {format_formula(phi.right)})"


def _as_formula(phi):
    return parse_formula(phi) if isinstance(phi, str) else phi


def _brouwer_tables(A: FiniteAlgebra):
    imp = A.implication()
    if imp is None:
        raise ValueError("algebra has no implication")
    L = A.lattice
    return np.array(L.meet), np.array(L.join), np.array(imp)


def evaluate(A: FiniteAlgebra, v: dict, phi):
    """Value (a carrier label) of a formula; v maps variables to carrier labels.

    Disjunction is the lattice meet, conjunction the join, and ~p is p -> top.
    """
    phi = _as_formula(phi)
    imp = A.implication()
    if imp is None:
        raise ValueError("algebra has no implication")
    L = A.lattice
    index = L.preorder.index

    def ev(p):
        if isinstance(p, Var):
            if p.name not in v:
                raise KeyError(f"unbound variable {p.name}")
            return index[v[p.name]]
        if isinstance(p, Not):
            return imp[ev(p.arg)][L.top]
        a, b = ev(p.left), ev(p.right)
        if isinstance(p, Or):
            return L.meet[a][b]
        if isinstance(p, And):
            return L.join[a][b]
        return imp[a][b]

    return L.label(ev(phi))


def evaluate_all(A: FiniteAlgebra, phi, variables=None):
    """Values (as indices) of phi under every valuation, in itertools.product order."""
    phi = _as_formula(phi)
    variables = list(variables or formula_vars(phi))
    meet, join, imp = _brouwer_tables(A)
    n = len(A)
    k = len(variables)
    grids = np.indices((n,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=int)
    env = {name: grids[i] for i, name in enumerate(variables)}
    top = A.top

    def ev(p):
        if isinstance(p, Var):
            if p.name not in env:
                raise KeyError(f"unbound variable {p.name}")
            return env[p.name]
        if isinstance(p, Not):
            return imp[ev(p.arg), top]
        a, b = ev(p.left), ev(p.right)
        if isinstance(p, Or):
            return meet[a, b]
        if isinstance(p, And):
            return join[a, b]
        return imp[a, b]

    vals = ev(phi)
    return np.broadcast_to(vals, (grids.shape[1],)), variables, grids


class Validity(NamedTuple):
    valid: bool
    countervaluation: dict | None
    value: object = None  # value of the formula under the countervaluation

    def __bool__(self):
        return self.valid


def is_valid(A: FiniteAlgebra, phi, max_vars: int = MAX_VARIABLES,
             max_carrier: int = MAX_CARRIER) -> Validity:
    """Valid iff every valuation sends phi to the unit (the bottom)."""
    phi = _as_formula(phi)
    variables = formula_vars(phi)
    if len(variables) > max_vars:
        raise ValueError(f"too many variables ({len(variables)} > {max_vars})")
    if len(A) > max_carrier:
        raise ValueError(f"carrier too large ({len(A)} > {max_carrier})")
    vals, variables, grids = evaluate_all(A, phi, variables)
    bad = np.nonzero(vals != A.bottom)[0]
    if bad.size == 0:
        return Validity(True, None)
    j = int(bad[0])
    cv = {name: A.label(int(grids[i][j])) for i, name in enumerate(variables)}
    return Validity(False, cv, A.label(int(vals[j])))


JANKOV = "~~A | ~A"


def theory_includes_jankov(A: FiniteAlgebra) -> bool:
    return is_valid(A, JANKOV).valid


INTUITIONISTIC_AXIOMS = (
    "A -> (B -> A)",
    "(A -> (B -> C)) -> ((A -> B) -> (A -> C))",
    "(A & B) -> A",
    "(A & B) -> B",
    "A -> (B -> (A & B))",
    "A -> (A | B)",
    "B -> (A | B)",
    "(A -> C) -> ((B -> C) -> ((A | B) -> C))",
    "(A -> B) -> ((A -> ~B) -> ~A)",
    "~A -> (A -> B)",
)


# ---------------------------------------------------------------------------
# algebra files


class AlgebraFormatError(ValueError):
    pass


def _parse_rows(lines, n, what):
    rows = [ln.split() for ln in lines]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise AlgebraFormatError(f"{what} must have {n} rows of {n} entries")
    return rows


def parse_algebra(text: str) -> FiniteAlgebra:
    """Sections ``carrier:``, ``leq:`` (0/1 rows), optional ``dot:`` (label rows)
    and ``one:``.  Without ``dot`` the algebra is the lattice's Brouwer algebra."""
    sections: dict = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.match(r"^\s*(carrier|leq|dot|one)\s*:(.*)$", line)
        if m:
            current = m.group(1)
            if current in sections:
                raise AlgebraFormatError(f"duplicate section {current!r}")
            sections[current] = [m.group(2).strip()] if m.group(2).strip() else []
        elif current is None:
            raise AlgebraFormatError(f"content before any section: {line.strip()!r}")
        else:
            sections[current].append(line.strip())
    if "carrier" not in sections or "leq" not in sections:
        raise AlgebraFormatError("carrier and leq sections are required")
    carrier = " ".join(sections["carrier"]).split()
    n = len(carrier)
    leq_rows = _parse_rows(sections["leq"], n, "leq")
    try:
        leq = [[int(x) != 0 for x in r] for r in leq_rows]
        L = FiniteLattice(FinitePreorder(carrier, leq))
    except ValueError as exc:
        raise AlgebraFormatError(str(exc)) from None
    index = L.preorder.index
    if "dot" not in sections:
        if "one" in sections:
            raise AlgebraFormatError("one given without dot")
        return FiniteAlgebra(L, L.join, L.bottom, None)
    try:
        dot = [[index[x] for x in r] for r in _parse_rows(sections["dot"], n, "dot")]
        one = index[" ".join(sections.get("one", [])).strip()] if "one" in sections else L.bottom
    except KeyError as exc:
        raise AlgebraFormatError(f"unknown element {exc.args[0]!r}") from None
    return FiniteAlgebra(L, dot, one, None)


def format_algebra(A: FiniteAlgebra) -> str:
    L = A.lattice
    out = ["carrier: " + " ".join(map(str, L.carrier)), "leq:"]
    out += ["  " + " ".join("1" if b else "0" for b in row) for row in L.leq]
    if A.dot != L.join or A.one != L.bottom:
        out.append("dot:")
        out += ["  " + " ".join(str(L.label(x)) for x in row) for row in A.dot]
        out.append(f"one: {L.label(A.one)}")
    return "\n".join(out) + "\n"


def load_algebra(path) -> FiniteAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())
