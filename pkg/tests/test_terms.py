import pytest
from hypothesis import given

from wbench.terms import (INF, Kind, Term, TermSyntaxError, atom, kind_implies, medv,
                          parse_term, print_term)

from strategies import terms


def test_parse_unary():
    assert parse_term("comp(lim)") is Term("comp", (atom("lim"),))


def test_parse_nested():
    t = parse_term("meet(prod(WKL,LPO), INF)")
    assert t.op == "meet"
    assert t.args[0] is Term("prod", (atom("WKL"), atom("LPO")))
    assert t.args[1] is INF


def test_unbalanced_reports_end_of_input():
    with pytest.raises(TermSyntaxError, match="end of input"):
        parse_term("mimp(C_2N, lim")


@pytest.mark.parametrize("bad", ["", "comp()", "prod(f)", "comp(f,g)", "f g", "1x", "INF(f)"])
def test_rejects_malformed(bad):
    with pytest.raises(TermSyntaxError):
        parse_term(bad)


def test_print():
    assert print_term(Term("neg", (INF,))) == "neg(INF)"
    assert print_term(Term("coprod", (atom("f"), atom("g")))) == "coprod(f,g)"
    assert print_term(medv("A")) == "medv(A)"


@given(terms)
def test_print_parse_roundtrip(t):
    assert parse_term(print_term(t)) is t


@given(terms)
def test_interning(t):
    assert Term(t.op, t.args, t.name) is t


def test_kind_order_examples():
    assert kind_implies(Kind.SW, Kind.TW)
    assert not kind_implies(Kind.TW, Kind.W)
    assert kind_implies(Kind.W, Kind.W)


def test_kind_order_is_partial_order():
    ks = list(Kind)
    for a in ks:
        for b in ks:
            if a is not b and kind_implies(a, b):
                assert not kind_implies(b, a)
            for c in ks:
                if kind_implies(a, b) and kind_implies(b, c):
                    assert kind_implies(a, c)
    # SW is the strongest, ptW the weakest
    assert all(kind_implies(Kind.SW, k) and kind_implies(k, Kind.ptW) for k in ks)


@pytest.mark.parametrize("text", ["sw", "PTW", "pw", "ptW"])
def test_kind_parse_case_insensitive(text):
    assert Kind.parse(text).value.upper() == text.upper()
