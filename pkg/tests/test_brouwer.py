import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbench import brouwer as B
from wbench.brouwer import And, Imp, Not, Or, Var


def two_chain():
    return B.chain_lattice(2)


def boolean4():
    return B.upset_lattice(B.antichain_poset(2))


@st.composite
def posets(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 2**32))
    density = draw(st.floats(0, 1))
    return B.random_poset(random.Random(seed), n, density)


# -- closure operators ---------------------------------------------------------


def test_identity_is_closure():
    P = B.v_poset()
    assert B.check_closure_operator(P, P.carrier).ok


def test_constant_top_is_closure():
    L = boolean4()
    assert B.check_closure_operator(L.preorder, [L.label(L.top)] * len(L)).ok


def test_deflationary_map_fails_axiom_one():
    P = B.chain_poset(2)  # 0 < 1
    rep = B.check_closure_operator(P, {0: 0, 1: 0})
    assert not rep.ok and rep.axiom == 1 and rep.witness == (1,)


def test_non_monotone_and_non_idempotent():
    P = B.chain_poset(3)
    assert B.check_closure_operator(P, {0: 1, 1: 2, 2: 2}).axiom == 2
    L = boolean4()
    lo = [x for x in range(4) if x not in (L.top, L.bottom)]
    # swapping the two middle elements and fixing the rest is extensive only if monotone
    c = {L.label(L.bottom): L.label(lo[0]), L.label(lo[0]): L.label(lo[0]),
         L.label(lo[1]): L.label(L.top), L.label(L.top): L.label(L.top)}
    assert B.check_closure_operator(L.preorder, c).ok
    c[L.label(lo[0])] = L.label(L.top)
    assert B.check_closure_operator(L.preorder, c).axiom == 2


def test_induced_order_identity():
    P = B.v_poset()
    assert B.induced_preorder(P, P.carrier).leq == P.leq


def test_induced_order_constant_top_is_total():
    L = boolean4()
    Q = B.induced_preorder(L.preorder, [L.label(L.top)] * len(L))
    assert all(all(row) for row in Q.leq)


def test_induced_order_merges():
    P = B.chain_poset(3)
    Q = B.induced_preorder(P, {0: 1, 1: 1, 2: 2})
    assert Q.le(0, 1) and Q.le(1, 0)
    assert not Q.le(2, 1)


def test_quotient_identity_is_copy():
    L = boolean4()
    Q = B.quotient_lattice(L, L.carrier)
    assert len(Q) == len(L) and Q.leq == L.leq


def test_quotient_collapsing_top_two():
    L = B.chain_lattice(4)
    Q = B.quotient_lattice(L, {0: 0, 1: 1, 2: 3, 3: 3})
    assert len(Q) == 3
    assert Q.preorder.is_antisymmetric()
    assert sum(map(sum, Q.leq)) == 6  # a 3-chain


def test_quotient_constant_top_is_trivial():
    L = boolean4()
    assert len(B.quotient_lattice(L, [L.label(L.top)] * len(L))) == 1


def _random_lattice_and_closure(seed):
    rng = random.Random(seed)
    L = B.upset_lattice(B.random_poset(rng, rng.randint(1, 3), rng.random()))
    closed = [x for x in range(len(L)) if rng.random() < 0.5]
    return L, B.closure_from_closed_set(L, closed)


@settings(max_examples=100)
@given(st.integers(0, 2**32))
def test_join_copreserved_meet_preserved(seed):
    L, ci = _random_lattice_and_closure(seed)
    c = [L.label(i) for i in ci]
    assert B.check_closure_operator(L.preorder, c).ok
    assert B.check_preservation(L.preorder, c, L.join).coPreserved
    assert B.check_preservation(L.preorder, c, L.meet).preserved


def test_constant_bottom_not_preserved():
    L = two_chain()
    box = [[L.bottom] * 2 for _ in range(2)]
    rep = B.check_preservation(L.preorder, [L.label(L.top)] * 2, box)
    assert not rep.preserved


# -- algebras ------------------------------------------------------------------


@pytest.mark.parametrize("P,size", [
    (B.chain_poset(1), 2), (B.chain_poset(2), 3), (B.v_poset(), 5),
])
def test_upset_algebra_sizes(P, size):
    assert len(B.upset_algebra(P)) == size


def test_two_chain_implication():
    A = B.chain_algebra(2)
    imp = A.implication()
    assert imp[A.top][A.bottom] == A.bottom


def test_three_chain_implication():
    A = B.chain_algebra(3)
    imp = A.implication()
    assert imp[2][1] == 0
    assert imp[1][2] == 2


def test_m3_has_no_co_residual():
    L = B.diamond_m3()
    res = B.co_residual(L, L.join)
    assert not res.ok and res.witness


def test_upset_algebra_is_brouwer():
    A = B.upset_algebra(B.chain_poset(2))
    rep = B.check_weihrauch_algebra(A)
    assert rep.classification == "Brouwer", rep


def test_constant_bottom_imp_is_weihrauch_not_deductive():
    A = B.chain_algebra(3)
    rep = B.check_weihrauch_algebra(A.with_imp([[A.bottom] * 3 for _ in range(3)]))
    assert rep.weihrauch and not rep.flags["deductive"]
    assert rep.classification == "Weihrauch"


def test_constant_top_imp_breaks_the_implication_law():
    A = B.chain_algebra(3)
    rep = B.check_weihrauch_algebra(A.with_imp([[A.top] * 3 for _ in range(3)]))
    assert "implication law" in rep.failures()


def test_m3_not_weihrauch():
    L = B.diamond_m3()
    rep = B.check_weihrauch_algebra(B.FiniteAlgebra(L, L.join, L.bottom, None))
    assert not rep.weihrauch
    assert "implication exists" in rep.failures()


def test_non_commutative_dot_is_not_troelstra():
    L = B.chain_lattice(3)
    # x.y = x unless x is the unit 0
    dot = [[y if x == 0 else x for y in range(3)] for x in range(3)]
    rep = B.check_weihrauch_algebra(B.FiniteAlgebra(L, dot, 0, None))
    assert rep.checks["monoid"] is None
    assert not rep.flags["commutative"]
    assert not rep.troelstra


def test_flags_on_chain():
    rep = B.check_weihrauch_algebra(B.chain_algebra(3))
    assert rep.flags == {"deductive": True, "commutative": True, "distributive": True}


@settings(max_examples=40, deadline=None)
@given(posets())
def test_random_upset_algebras_are_brouwer(P):
    assert B.check_weihrauch_algebra(B.upset_algebra(P)).brouwer


# -- formulas ----------------------------------------------------------------


def test_parse_precedence():
    assert B.parse_formula("~A & B | C -> A -> B") == Imp(
        Or(And(Not(Var("A")), Var("B")), Var("C")), Imp(Var("A"), Var("B")))


@pytest.mark.parametrize("bad", ["", "A &", "(A", "a", "A B", "A -> "])
def test_parse_errors(bad):
    with pytest.raises(B.FormulaSyntaxError):
        B.parse_formula(bad)


@given(st.sampled_from(B.INTUITIONISTIC_AXIOMS + (B.JANKOV, "~(A & ~A)", "A | B -> B")))
def test_format_parse_roundtrip(text):
    phi = B.parse_formula(text)
    assert B.parse_formula(B.format_formula(phi)) == phi


def test_evaluate_variable():
    A = B.chain_algebra(3)
    assert B.evaluate(A, {"A": 1}, "A") == 1


def test_evaluate_three_chain():
    A = B.chain_algebra(3)
    v = {"A": 1}
    assert B.evaluate(A, v, "~A") == 2
    assert B.evaluate(A, v, "~~A") == 0
    assert B.evaluate(A, v, "~~A | ~A") == 0


def test_evaluate_two_element():
    A = B.chain_algebra(2)
    v = {"A": A.label(A.top)}
    assert B.evaluate(A, v, "~A") == A.label(A.bottom)
    assert B.evaluate(A, v, "~~A") == A.label(A.top)
    assert B.evaluate(A, v, "~~A | ~A") == A.label(A.bottom)


def test_self_implication_valid():
    for A in (B.chain_algebra(2), B.upset_algebra(B.v_poset())):
        assert B.is_valid(A, "A -> A").valid


@pytest.mark.parametrize("n", range(1, 7))
def test_jankov_on_chains(n):
    assert B.is_valid(B.chain_algebra(n), B.JANKOV).valid


def test_jankov_fails_on_v():
    A = B.upset_algebra(B.v_poset())
    v = B.is_valid(A, B.JANKOV)
    assert not v.valid
    assert B.evaluate(A, v.countervaluation, B.JANKOV) == v.value != A.label(A.bottom)


def test_theory_includes_jankov():
    assert B.theory_includes_jankov(B.chain_algebra(2))
    assert B.theory_includes_jankov(B.chain_algebra(3))
    assert not B.theory_includes_jankov(B.upset_algebra(B.v_poset()))


@settings(max_examples=25, deadline=None)
@given(posets(), st.sampled_from(B.INTUITIONISTIC_AXIOMS))
def test_intuitionistic_axioms_valid(P, ax):
    assert B.is_valid(B.upset_algebra(P), ax).valid


@settings(max_examples=40, deadline=None)
@given(posets(3), st.sampled_from(["A -> B | ~C", "~(A & B) -> ~A | ~B", "((A -> B) -> A) -> A"]))
def test_vectorized_matches_pointwise(P, text):
    A = B.upset_algebra(P)
    vals, names, grids = B.evaluate_all(A, text)
    for j in range(len(vals)):
        v = {name: A.label(int(grids[i][j])) for i, name in enumerate(names)}
        assert A.label(int(vals[j])) == B.evaluate(A, v, text)


def test_limits():
    with pytest.raises(ValueError):
        B.is_valid(B.chain_algebra(2), "A & B & C & D & E")
    with pytest.raises(ValueError):
        B.upset_algebra(B.antichain_poset(7))


# -- algebra files ----------------------------------------------------------


@pytest.mark.parametrize("A", [B.chain_algebra(3), B.upset_algebra(B.v_poset())])
def test_algebra_file_roundtrip(A):
    again = B.parse_algebra(B.format_algebra(A))
    assert again.carrier == tuple(map(str, A.carrier))
    assert again.lattice.leq == A.lattice.leq


@pytest.mark.parametrize("text", [
    "leq:\n 1\n",
    "carrier: a b\nleq:\n 1 1\n",
    "carrier: a b\nleq:\n 1 1\n 1 1\n",
    "carrier: a\nleq:\n 1\ndot:\n z\n",
    "carrier: a\nleq:\n 1\none: a\n",
    "junk\ncarrier: a\nleq:\n 1\n",
])
def test_algebra_file_errors(text):
    with pytest.raises(B.AlgebraFormatError):
        B.parse_algebra(text)
