import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbench.kb import load_kb, seed_kb
from wbench.rewrite import (RULES, Normalizer, _vars, equivalent, lookup_rule, normalize,
                            rewrite_trace, rule_families)
from wbench.terms import Kind, atom, parse_term, random_term

from strategies import terms


@pytest.fixture(scope="module")
def seed():
    return seed_kb()


def p(text):
    return parse_term(text)


def test_lookup_r1():
    assert lookup_rule("R1").kind_tag is Kind.SW


def test_catalog_size():
    assert len(rule_families()) >= 17


def test_rhs_variables_occur_in_lhs():
    for r in RULES:
        assert _vars(r.rhs) <= _vars(r.lhs), r.name


def test_rule_tags_are_sw_or_w_or_declared():
    assert {r.kind_tag for r in RULES} <= {Kind.SW, Kind.W, Kind.TW}


def test_double_completion(seed):
    assert normalize(p("comp(comp(lim))"), Kind.SW) is p("comp(lim)")
    # the seed also knows lim is strongly complete, so the completion disappears
    assert normalize(p("comp(comp(lim))"), Kind.SW, seed) is p("lim")


def test_jankov_instance_collapses(seed):
    t = p("meet(neg(neg(WKL)), neg(WKL))")
    assert normalize(t, Kind.W, seed) is p("0")


def test_complete_problem_absorbs_completion(seed):
    assert normalize(p("comp(lim)"), Kind.W, seed) is p("lim")
    # stronglyComplete is needed at SW
    kb = load_kb("atom f\nprop complete f\n")
    assert normalize(p("comp(f)"), Kind.SW, kb) is p("comp(f)")
    assert normalize(p("comp(f)"), Kind.W, kb) is p("f")


def test_parallelization_over_product():
    assert equivalent(p("par(prod(LPO,LPO))"), p("prod(par(LPO),par(LPO))"), Kind.SW)


def test_parallelized_completion_of_coproduct():
    a = p("prod(par(comp(f)),par(comp(g)))")
    b = p("par(comp(coprod(f,g)))")
    assert equivalent(a, b, Kind.W)


def test_r9_does_not_fire_at_sw():
    a = p("prod(par(comp(f)),par(comp(g)))")
    assert normalize(a, Kind.SW) is a
    _, log = rewrite_trace(a, Kind.SW)
    assert "R9" not in [name for name, _, _ in log]
    _, log = rewrite_trace(a, Kind.W)
    assert "R9" in [name for name, _, _ in log]


def test_guarded_rule_blocked_without_fact():
    # f not known to differ from INF: neg(f) stays
    assert normalize(p("neg(f)"), Kind.W) is p("neg(f)")
    kb = load_kb("atom f\nfact nle W INF f\n")
    assert normalize(p("neg(f)"), Kind.W, kb) is p("INF")


def test_reflexive_equivalence():
    assert equivalent(atom("f"), atom("f"), Kind.SW)


def test_fpar_needs_pointed():
    t = p("fpar(fpar(f))")
    assert normalize(t, Kind.SW) is t
    kb = load_kb("atom f\nprop pointed f\n")
    assert normalize(t, Kind.SW, kb) is p("fpar(f)")


def test_fuzz_terminates():
    rng = random.Random(7)
    for _ in range(10_000):
        t = random_term(rng, 5)
        for k in (Kind.SW, Kind.W, Kind.TW):
            normalize(t, k)


@settings(max_examples=300)
@given(terms, st.sampled_from(list(Kind)), st.integers(0, 2**32))
def test_random_rule_order_agrees(t, kind, s):
    assert Normalizer(rng=random.Random(s)).normalize(t, kind) is normalize(t, kind)


@given(terms, st.sampled_from(list(Kind)))
def test_normal_form_is_fixpoint(t, kind):
    nf = normalize(t, kind)
    assert normalize(nf, kind) is nf


@settings(max_examples=200)
@given(terms, terms)
def test_kind_monotone(t1, t2):
    for k1 in Kind:
        if equivalent(t1, t2, k1):
            for k2 in Kind:
                from wbench.terms import kind_implies
                if kind_implies(k1, k2):
                    assert equivalent(t1, t2, k2)
