import pytest

from wbench.deduction import (FAMILY_LAWS, RULES, Closure, close, check_consistency, explain,
                              lookup_rule, query, query_equiv, query_prop, rule_families)
from wbench.kb import Fact, load_kb, seed_kb
from wbench.terms import Kind, atom, parse_term

p = parse_term


def test_d3_is_a_biconditional():
    rules = lookup_rule("D3")
    assert len(rules) >= 2
    concl = {(r.conclusion.rel, r.conclusion.tag) for r in rules}
    assert ("le", Kind.TW) in concl and ("le", Kind.W) in concl


def test_d8_is_guarded():
    rules = lookup_rule("D8")
    assert any(pr.rel == "prop" and pr.tag == "complete" for r in rules for pr in r.premises)


def test_catalog():
    assert len(rule_families()) >= 19
    assert set(rule_families()) >= set(FAMILY_LAWS)
    for r in RULES:
        assert r.law


def test_contrapositives_present():
    names = {r.name for r in RULES}
    assert any(n.endswith("~1") for n in names)


CHAIN = """
atom f
atom g
atom h
atom k
fact le W f g   # one
fact le W g h   # two
fact le W h k   # three
fact nle TW k f   # four
"""


@pytest.fixture(scope="module")
def chain():
    return close(load_kb(CHAIN))


def test_transitivity_and_trace(chain):
    fact = Fact("le", Kind.W, atom("f"), atom("h"))
    assert chain.has(fact)
    text = explain(chain.trace(fact)).splitlines()
    assert text[0].startswith("le(W, f, h)")
    assert "[given: one]" in text[1] and "[given: two]" in text[2]


def test_given_fact_single_line(chain):
    tr = chain.trace(Fact("le", Kind.W, atom("f"), atom("g")))
    assert explain(tr) == "le(W, f, g)  [given: one]"


def test_depth_three_tree(chain):
    deep = [f for f in chain.sorted_facts() if chain.trace(f).depth() == 3]
    assert deep
    lines = explain(chain.trace(deep[0])).splitlines()
    assert max(len(ln) - len(ln.lstrip()) for ln in lines) == 4


def test_negative_via_contrapositive(chain):
    res = query(chain, "le", Kind.W, atom("k"), atom("f"))
    assert res.answer == "NO"
    assert res.trace.conclusion == Fact("nle", Kind.W, atom("k"), atom("f"))


def test_unknown_without_evidence(chain):
    assert query(chain, "le", Kind.W, atom("g"), atom("f")).answer == "UNKNOWN"


def test_d3_trace_is_two_lines():
    cl = close(load_kb("atom f\n"))
    fact = cl.kb.normalize_fact(Fact("le", Kind.STW, p("comp(f)"), atom("f")))
    assert cl.facts[fact].rule.startswith("D3")
    lines = explain(cl.trace(fact)).splitlines()
    assert len(lines) == 2 and "D3" in lines[0]
    assert "completion" in lines[0]


def test_all_derivations_replay(chain):
    assert chain.replay_all() == []


def test_empty_kb_consistent():
    assert check_consistency(load_kb("")) == []


def test_query_extends_universe(chain):
    res = query(chain, "le", Kind.W, p("comp(comp(f))"), p("comp(g)"))
    assert res.answer == "YES"


def test_equivalence_query():
    kb = load_kb("atom f\natom g\nfact le SW f g\nfact le SW g f\n")
    answer, traces = query_equiv(kb, Kind.TW, atom("f"), atom("g"))
    assert answer == "YES" and len(traces) == 2


# -- seed knowledge base (one shared closure) ---------------------------------


def test_seed_consistent(seed_closure):
    assert seed_closure.contradictions == []


def test_seed_id_total_equivalent_to_zero(seed_closure):
    assert query(seed_closure, "le", Kind.TW, p("1"), p("0")).answer == "YES"
    assert query_equiv(seed_closure, Kind.TW, p("1"), p("0"))[0] == "YES"


def test_seed_completion_of_cn_not_below(seed_closure):
    res = query(seed_closure, "le", Kind.W, p("comp(C_N)"), p("C_N"))
    assert res.answer == "NO"
    assert query(seed_closure, "nle", Kind.W, p("comp(C_N)"), p("C_N")).answer == "YES"


def test_seed_lim_not_below_wkl(seed_closure):
    # refuted: WKL reduces to lim strictly, and the star facts give the separation
    res = query(seed_closure, "le", Kind.W, p("lim"), p("WKL"))
    assert res.answer in ("NO", "UNKNOWN")
    if res.answer == "NO":
        assert seed_closure.replay(res.trace.conclusion)


def test_seed_lim_complete(seed_closure):
    assert query_prop(seed_closure, "complete", p("lim")).answer == "YES"


def test_seed_lpo_below_lim_at_ptw(seed_closure):
    assert seed_closure.has(Fact("le", Kind.ptW, p("LPO"), p("lim")))
    # also derived, not just given, one kind up from the parallelization chain
    tr = seed_closure.trace(Fact("le", Kind.W, p("LPO"), p("lim")))
    assert tr.rule != "given" and tr.depth() >= 2


def test_seed_replays(seed_closure):
    assert seed_closure.replay_all() == []


# -- seed extensions: each closes the whole zoo again ------------------------


def test_total_reduction_to_complete_problem_is_a_reduction():
    kb = seed_kb().copy()
    kb.declare_atom("f0")
    kb.add_line("fact le TW f0 WKL  # assumption")
    cl = close(kb)
    fact = Fact("le", Kind.W, atom("f0"), atom("WKL"))
    assert cl.has(fact)
    # D8 and D3 (via comp(WKL) = WKL) both apply; either is a valid first derivation
    assert cl.facts[fact].rule.split(".")[0] in ("D3", "D8")
    assert cl.replay(fact)


@pytest.mark.parametrize("line,pair", [
    ("fact le W id zero", ("le", Kind.W, "id", "zero")),
    ("fact le STW id constC", ("le", Kind.STW, "id", "constC")),
])
def test_seed_extensions_clash(line, pair):
    kb = seed_kb().copy()
    kb.add_line(line)
    reports = check_consistency(kb)
    assert reports
    rel, kind, a, b = pair
    target = Fact(rel, kind, p(a), p(b))
    assert any(c.positive.conclusion == target for c in reports)
