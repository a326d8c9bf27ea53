"""Executable acceptance checks.

Each ``criterion_N`` returns a :class:`Check`.  The checks carry their own
brute-force oracles where one exists, rather than trusting the routine under
test to grade itself.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

from . import brouwer as B
from . import streams as S
from .deduction import check_consistency, close, query, query_equiv
from .kb import load_kb, seed_kb
from .rewrite import Normalizer
from .terms import INF, ZERO, Kind, Term, atom, comp, kind_implies, neg, par, random_term

SEED = 20240611


@dataclass
class Check:
    number: int
    title: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} criterion {self.number:2d}: {self.title} ({self.detail})"


@lru_cache(maxsize=1)
def seed_closure():
    return close(seed_kb())


def _t(op, *args):
    return Term(op, tuple(args))


# ---------------------------------------------------------------------------


def criterion_1(n: int = 1000) -> Check:
    rng = random.Random(SEED)
    norm = Normalizer()
    bad = []
    for _ in range(n):
        t = random_term(rng, 4)
        for k in (Kind.SW, Kind.W):
            if norm.normalize(comp(comp(t)), k) is not norm.normalize(comp(t), k):
                bad.append(("comp", k, t))
            if norm.normalize(par(par(t)), k) is not norm.normalize(par(t), k):
                bad.append(("par", k, t))
    return Check(1, "completion and parallelization are idempotent under normalization", not bad,
                 f"{n} terms x 2 kinds, {len(bad)} failures" + (f", first {bad[0]}" if bad else ""))


SEPARATIONS = (
    # (lhs, rhs, kind that fails) for the seeded separating examples
    ("id", "constC", Kind.STW),
    ("id", "zero", Kind.W),
    ("id", "idRestrProd", Kind.W),
)


def criterion_2() -> Check:
    cl = seed_closure()
    kb = cl.kb
    missing = []
    count = 0
    for st in kb.statements:
        f = st.fact
        if f is None or f.rel != "le" or f.tag is not Kind.SW:
            continue
        count += 1
        for k in (Kind.W, Kind.STW, Kind.TW):
            if query(cl, "le", k, f.lhs, f.rhs).answer != "YES":
                missing.append((k, f.lhs, f.rhs))
    leaks = []
    for a, b, fails in SEPARATIONS:
        for k in Kind:
            # every kind at least as strong as the failing one must stay unproved
            if kind_implies(k, fails):
                ans = query(cl, "le", k, atom(a), atom(b)).answer
                if ans == "YES":
                    leaks.append((k, a, b))
    ok = not missing and not leaks and count > 0
    return Check(2, "seeded strong reductions lift, separations block their converses", ok,
                 f"{count} seeded SW facts, {len(missing)} missing lifts, {len(leaks)} leaked converses")


def wkl_completeness_kb(n: int = 20):
    kb = seed_kb()
    names = []
    for _ in range(n):
        name = kb.fresh_atom("fresh")
        kb.declare_atom(name)
        kb.add_line(f"fact le TW {name} WKL  # fresh problem totally below WKL")
        names.append(name)
    return kb, names


def drop_wkl_completeness(fact) -> bool:
    """The completeness flags of WKL and the strong equivalences that transfer one."""
    wkl = atom("WKL")
    if fact.rel in ("prop", "notprop") and fact.lhs is wkl:
        return True
    return fact.rel == "le" and fact.tag is Kind.SW and wkl in (fact.lhs, fact.rhs)


def criterion_3(n: int = 20) -> Check:
    kb, names = wkl_completeness_kb(n)
    cl = close(kb)
    wkl = atom("WKL")
    derived = sum(query(cl, "le", Kind.W, atom(x), wkl).answer == "YES" for x in names)
    cl2 = close(kb.without(drop_wkl_completeness))
    unknown = sum(query(cl2, "le", Kind.W, atom(x), wkl).answer == "UNKNOWN" for x in names)
    ok = derived == n and unknown == n
    return Check(3, "total reductions to a complete problem become ordinary ones", ok,
                 f"{derived}/{n} derived with WKL complete, {unknown}/{n} unknown without")


def distributivity_pairs(f, g, h):
    cf, cg, ch = comp(f), comp(g), comp(h)
    return (
        (_t("meet", cf, _t("coprod", cg, ch)),
         _t("coprod", _t("meet", cf, cg), _t("meet", cf, ch))),
        (_t("coprod", f, _t("meet", cg, ch)),
         _t("meet", _t("coprod", cf, cg), _t("coprod", cf, ch))),
    )


def criterion_4() -> Check:
    kb = load_kb("atom f\natom g\natom h\n")
    names = [atom(x) for x in ("f", "g", "h")]
    proved = total = 0
    for f, g, h in itertools.product(names, repeat=3):
        pairs = distributivity_pairs(f, g, h)
        cl = close(kb, depth=0, extra_terms=[t for p in pairs for t in p])
        total += len(pairs)
        proved += sum(query_equiv(cl, Kind.TW, a, b)[0] == "YES" for a, b in pairs)
    seed = seed_closure()
    contradictions = check_consistency(seed)
    ndist = [st.fact for st in seed.kb.statements
             if st.fact is not None and st.fact.rel == "nle" and st.fact.tag is Kind.STW
             and "ndistF" in st.fact.lhs.atoms()]
    blocked = all(query(seed, "le", Kind.STW, f.lhs, f.rhs).answer != "YES" for f in ndist)
    ok = proved == total and not contradictions and blocked and bool(ndist)
    return Check(4, "distributivity holds totally and is never derived strongly", ok,
                 f"{proved}/{total} TW equivalences, {len(contradictions)} contradictions, "
                 f"STW failure {'kept' if blocked else 'violated'}")


def criterion_5() -> Check:
    kb = seed_kb()
    cases = []
    for name in ("LPO", "lim", "WKL"):
        f = atom(name)
        assert kb.guard_nle(Kind.W, INF, f)
        cases.append(f)
    cases.append(INF)
    results = {str(f): kb.normalize(_t("meet", neg(neg(f)), neg(f)), Kind.W) for f in cases}
    ok = all(v is ZERO for v in results.values())
    return Check(5, "double negation meets negation at 0", ok,
                 ", ".join(f"{k}: {v}" for k, v in results.items()))


def _brute_adjunction(A: B.FiniteAlgebra, imp) -> bool:
    L = A.lattice
    n, leq = len(L), L.leq
    return all(leq[imp[b][a]][c] == leq[a][L.join[b][c]]
               for a, b, c in itertools.product(range(n), repeat=3))


def all_small_posets(max_size: int = 5):
    for n in range(0, max_size + 1):
        yield from B.natural_posets(n)


def criterion_6(max_size: int = 5) -> Check:
    total = brouwer = adj = 0
    for P in all_small_posets(max_size):
        L = B.upset_lattice(P)
        res = B.co_residual(L, L.join)
        total += 1
        if not res.ok:
            continue
        adj += _brute_adjunction(B.FiniteAlgebra(L), res.table)
        brouwer += B.check_weihrauch_algebra(B.FiniteAlgebra(L, L.join, L.bottom, res.table)).brouwer
    ok = total == adj == brouwer and total > 100
    return Check(6, "up-set algebras are Brouwer algebras", ok,
                 f"{total} posets up to {max_size} elements, {adj} adjunctions, {brouwer} Brouwer")


def _python_eval(A, v, phi):
    """Direct recursive evaluation on index tables (independent of the vectorized path)."""
    L, imp = A.lattice, A.implication()
    if isinstance(phi, B.Var):
        return v[phi.name]
    if isinstance(phi, B.Not):
        return imp[_python_eval(A, v, phi.arg)][L.top]
    a, b = _python_eval(A, v, phi.left), _python_eval(A, v, phi.right)
    if isinstance(phi, B.Or):
        return L.meet[a][b]
    if isinstance(phi, B.And):
        return L.join[a][b]
    return imp[a][b]


def _brute_valid(A, phi):
    phi = B.parse_formula(phi) if isinstance(phi, str) else phi
    names = B.formula_vars(phi)
    for vals in itertools.product(range(len(A)), repeat=len(names)):
        v = dict(zip(names, vals))
        if _python_eval(A, v, phi) != A.bottom:
            return False, v
    return True, None


def criterion_7() -> Check:
    chains_ok = []
    for n in range(1, 7):
        A = B.chain_algebra(n)
        chains_ok.append(B.is_valid(A, B.JANKOV).valid and _brute_valid(A, B.JANKOV)[0])
    V = B.upset_algebra(B.v_poset())
    res = B.is_valid(V, B.JANKOV)
    counter_ok = False
    if not res.valid:
        index = V.lattice.preorder.index
        v = {k: index[x] for k, x in res.countervaluation.items()}
        counter_ok = _python_eval(V, v, B.parse_formula(B.JANKOV)) != V.bottom
    ok = all(chains_ok) and not res.valid and counter_ok and not _brute_valid(V, B.JANKOV)[0]
    return Check(7, "weak excluded middle on chains and the V-poset", ok,
                 f"chains 1..6 valid: {sum(chains_ok)}/6, V-poset countervaluation "
                 f"{res.countervaluation} -> {res.value}")


def generated_brouwer_algebras(count: int = 50, seed: int = SEED):
    rng = random.Random(seed)
    out = [B.chain_algebra(n) for n in (2, 3, 4)]
    while len(out) < count:
        n = rng.randint(1, 4)
        out.append(B.upset_algebra(B.random_poset(rng, n, rng.choice((0.2, 0.4, 0.7)))))
    return out


def criterion_8(count: int = 50) -> Check:
    algebras = generated_brouwer_algebras(count)
    failures = []
    for i, A in enumerate(algebras):
        for ax in B.INTUITIONISTIC_AXIOMS:
            if not B.is_valid(A, ax).valid:
                failures.append((i, ax))
    ok = not failures and len(algebras) == count
    return Check(8, "intuitionistic axioms evaluate to the unit", ok,
                 f"{len(B.INTUITIONISTIC_AXIOMS)} schemata x {len(algebras)} algebras, "
                 f"{len(failures)} failures")


def criterion_9(names: int = 200, transformers: int = 100) -> Check:
    rng = random.Random(SEED)
    bad_names = 0
    for _ in range(names):
        p = S.random_upname(rng, 5, 4, 5)
        if S.decode_completion(S.BAIRE, S.shift_plus(p)) != p:
            bad_names += 1
        q = S.shift_minus(p)
        expect = S.BOTTOM if isinstance(q, S.FiniteWord) else q
        if S.decode_completion(S.BAIRE, p) != expect:
            bad_names += 1
    bad_total = stalled = defined = 0
    for _ in range(transformers):
        F = S.random_transducer(rng)
        G = S.totalize(F)
        G0 = S.totalize(F, lift=False)
        for _ in range(5):
            p = S.random_upname(rng)
            out, g, g0 = F.apply(p), G.apply(p), G0.apply(p)
            if not isinstance(g, S.UPName) or not isinstance(g0, S.UPName):
                bad_total += 1
                continue
            if isinstance(out, S.FiniteWord):
                stalled += 1
                if S.shift_minus(g) != out:
                    bad_total += 1
                continue
            defined += 1
            if S.shift_minus(g) != out:
                bad_total += 1
            if S.decode_completion(S.BAIRE, g0) != S.decode_completion(S.BAIRE, out):
                bad_total += 1
    ok = not bad_names and not bad_total and stalled > 0 and defined > 0
    return Check(9, "precompletion shifts and totalization", ok,
                 f"{names} names ({bad_names} bad), {transformers} transformers on "
                 f"{stalled} stalling and {defined} defined inputs ({bad_total} bad)")


def criterion_10() -> Check:
    samples = S.all_upnames(4, 3, 3)
    results = {}
    for name in ("LPO", "SORT", "ACC_2", "ACC_N"):
        f = S.PROBLEMS[name]
        H, K = S.completeness_witness(name)
        results[name] = S.check_reduction(S.completion(f), f, H, K, samples)
    _, K = S.completeness_witness("LPO")
    control = S.check_reduction(S.completion(S.LPO), S.LPO, S.IDENTITY, K, samples)
    ok = all(r.ok for r in results.values()) and not control.ok
    detail = ", ".join(f"{k}: {len(v.failures)} failures" for k, v in results.items())
    return Check(10, "completeness witnesses reduce completions", ok,
                 f"{len(samples)} names; {detail}; corrupted H: {len(control.failures)} failures")


# -- closure-operator metatheory ----------------------------------------------


def random_closure_instance(rng: random.Random, max_carrier: int = 8):
    """(preorder, closure map by index, lattice or None, second closure map)."""
    kind = rng.random()
    if kind < 0.15:
        L = rng.choice((B.diamond_m3(), B.pentagon_n5()))
    elif kind < 0.3:
        L = B.chain_lattice(rng.randint(1, max_carrier))
    else:
        L = B.upset_lattice(B.random_poset(rng, rng.randint(1, 3), rng.random()))
    n = len(L)

    def closure():
        closed = [x for x in range(n) if rng.random() < 0.4]
        return B.closure_from_closed_set(L, closed)

    c, c2 = closure(), closure()
    if rng.random() < 0.5 or n >= max_carrier:
        return L.preorder, c, L, c2
    # blow up some elements into equivalent copies to obtain a proper preorder
    copies = rng.randint(1, max_carrier - n)
    src = [rng.randrange(n) for _ in range(copies)]
    base = list(range(n)) + src
    m = len(base)
    leq = [[L.leq[base[i]][base[j]] for j in range(m)] for i in range(m)]
    P = B.FinitePreorder(range(m), leq)
    lift = lambda cmap: tuple(cmap[base[i]] for i in range(m))  # noqa: E731
    return P, lift(c), None, lift(c2)


def _check_metatheory(P, c, L, c2, meet, join):
    n, leq = len(P), P.leq
    fails = []
    rep = B.check_closure_operator(P, list(P.carrier[i] for i in c))
    if not rep.ok:
        return [f"generated map is not a closure operator: {rep}"]
    Q = B.induced_preorder(P, [P.carrier[i] for i in c])
    lc = Q.leq
    # (1)
    for x, y in itertools.product(range(n), repeat=2):
        if lc[x][y] != leq[c[x]][c[y]]:
            fails.append("(1) x <=c y differs from c(x) <= c(y)")
            break
        if leq[x][y] and not lc[x][y]:
            fails.append("(1) <= not contained in <=c")
            break
    # (2)
    eq = [[lc[x][y] and lc[y][x] for y in range(n)] for x in range(n)]
    for x, y, z in itertools.product(range(n), repeat=3):
        if not eq[x][x] or (eq[x][y] != eq[y][x]) or (eq[x][y] and eq[y][z] and not eq[x][z]):
            fails.append("(2) ==c not an equivalence")
            break
    # (3a) monotone operations stay monotone; (3b) meet_c is an infimum; (3c) join_c a supremum
    mc = [[meet[c[x]][c[y]] for y in range(n)] for x in range(n)]
    jc = [[join[c[x]][c[y]] for y in range(n)] for x in range(n)]
    for tab, name in ((mc, "meet"), (jc, "join")):
        for x1, x2, y in itertools.product(range(n), repeat=3):
            if lc[x1][x2] and not (lc[tab[x1][y]][tab[x2][y]] and lc[tab[y][x1]][tab[y][x2]]):
                fails.append(f"(3a) {name}_c not monotone")
                break
    for x, y in itertools.product(range(n), repeat=2):
        if not (lc[mc[x][y]][x] and lc[mc[x][y]][y]):
            fails.append("(3b) meet_c not a lower bound")
        if not (lc[x][jc[x][y]] and lc[y][jc[x][y]]):
            fails.append("(3c) join_c not an upper bound")
        for z in range(n):
            if lc[z][x] and lc[z][y] and not lc[z][mc[x][y]]:
                fails.append("(3b) meet_c not greatest")
            if lc[x][z] and lc[y][z] and not lc[jc[x][y]][z]:
                fails.append("(3c) join_c not least")
        # plain join may replace join_c
        j = join[x][y]
        if not (lc[j][jc[x][y]] and lc[jc[x][y]][j]):
            fails.append("x v y not ==c x v_c y")
    # (4)
    if L is not None:
        try:
            Lq = B.quotient_lattice(L, [L.carrier[i] for i in c])
            classes = len(B.closure_classes(P, [P.carrier[i] for i in c])[1])
            if len(Lq) != classes:
                fails.append("(4) quotient has the wrong size")
        except ValueError as exc:
            fails.append(f"(4) quotient is not a lattice: {exc}")
    # preservation of suprema and infima
    labels = [P.carrier[i] for i in c]
    if not B.check_preservation(P, labels, join).coPreserved:
        fails.append("join does not co-preserve c")
    if not B.check_preservation(P, labels, meet).preserved:
        fails.append("meet does not preserve c")
    # (5) c2 . c is monotone for <= and <=c
    cc = [c2[c[x]] for x in range(n)]
    for x, y in itertools.product(range(n), repeat=2):
        if leq[x][y] and not leq[cc[x]][cc[y]]:
            fails.append("(5) c'c not monotone for <=")
            break
        if lc[x][y] and not lc[cc[x]][cc[y]]:
            fails.append("(5) c'c not monotone for <=c")
            break
    # preservation by a second closure operator
    if B.preserved_by(P, labels, [P.carrier[i] for i in c2]):
        if not B.check_closure_operator(Q, [P.carrier[i] for i in cc]).ok:
            fails.append("c preserved by c' but c'c is not a closure operator for <=c")
    return fails


def _preorder_tables(P):
    """meet/join tables on P: for blown-up preorders pick any representative."""
    n, leq = len(P), P.leq
    meet = [[None] * n for _ in range(n)]
    join = [[None] * n for _ in range(n)]
    for x, y in itertools.product(range(n), repeat=2):
        lows = [z for z in range(n) if leq[z][x] and leq[z][y]]
        ups = [z for z in range(n) if leq[x][z] and leq[y][z]]
        meet[x][y] = next(z for z in lows if all(leq[w][z] for w in lows))
        join[x][y] = next(z for z in ups if all(leq[z][w] for w in ups))
    return meet, join


def criterion_11(count: int = 100) -> Check:
    rng = random.Random(SEED + 11)
    failures = []
    quotients = 0
    for i in range(count):
        P, c, L, c2 = random_closure_instance(rng)
        if L is not None:
            meet, join = L.meet, L.join
            quotients += 1
        else:
            meet, join = _preorder_tables(P)
        fails = _check_metatheory(P, c, L, c2, meet, join)
        if fails:
            failures.append((i, fails[0]))
    ok = not failures
    return Check(11, "closure-operator metatheory on finite preorders", ok,
                 f"{count} instances ({quotients} with quotient lattices), {len(failures)} failures"
                 + (f", first {failures[0]}" if failures else ""))


def criterion_12() -> Check:
    first = seed_closure()
    second = close(seed_kb())
    same = first.fact_set() == second.fact_set()
    same_text = [str(f) for f in first.sorted_facts()] == [str(f) for f in second.sorted_facts()]
    bad_replay = second.replay_all()
    contradictions = check_consistency(second)
    ok = same and same_text and not bad_replay and not contradictions
    return Check(12, "closure is deterministic, replayable and consistent", ok,
                 f"{len(second.facts)} facts, identical={same and same_text}, "
                 f"{len(bad_replay)} replay failures, {len(contradictions)} contradictions")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def run(numbers=None):
    for i in numbers or sorted(CRITERIA):
        yield CRITERIA[i]()
