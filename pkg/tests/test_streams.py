import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbench import streams as S
from wbench.streams import BOTTOM, FiniteWord, UPName, parse_upname

ZERO = UPName.const(0)
ONE = UPName.const(1)


@st.composite
def names(draw, max_symbol=3):
    pre = draw(st.lists(st.integers(0, max_symbol), max_size=4))
    per = draw(st.lists(st.integers(0, max_symbol), min_size=1, max_size=3))
    return UPName(pre, per)


# -- names ---------------------------------------------------------------------


def test_syntax():
    p = parse_upname("1,2,3;(4,5)")
    assert p.prefix(7) == (1, 2, 3, 4, 5, 4, 5)
    assert str(p) == "1,2,3;(4,5)"
    assert parse_upname("0") == ZERO


@pytest.mark.parametrize("bad", ["1;(2", "1;", "x;1", ";()"])
def test_syntax_errors(bad):
    with pytest.raises(S.StreamError):
        parse_upname(bad)


def test_normal_form_is_minimal():
    assert UPName([1, 2, 1, 2], [1, 2, 1, 2]) == UPName([], [1, 2])
    assert UPName([0, 0], [0]) == ZERO


@given(names())
def test_str_roundtrip(p):
    assert parse_upname(str(p)) == p


@given(names(), names())
def test_equality_is_semantic(p, q):
    assert (p == q) == S.unroll_equal(p, q)


# -- pairing -------------------------------------------------------------------


def test_interleave_constants():
    assert S.interleave(ZERO, ONE).prefix(6) == (0, 1, 0, 1, 0, 1)


@given(names(), names())
def test_projections_invert_interleave(p, q):
    r = S.interleave(p, q)
    assert S.proj_even(r) == p
    assert S.proj_odd(r) == q


def test_interleave_with_itself_doubles_period():
    p = parse_upname("5;(1,2)")
    r = S.interleave(p, p)
    assert r == parse_upname("5,5;(1,1,2,2)")
    assert len(r.period) == 4


@pytest.mark.parametrize("n,k,m", [(0, 0, 0), (1, 2, 8), (2, 1, 7)])
def test_cantor_pair(n, k, m):
    assert S.cantor_pair(n, k) == m


@given(st.integers(0, 10**6))
def test_cantor_unpair_inverse(m):
    assert S.cantor_pair(*S.cantor_unpair(m)) == m


def test_tuple_of_zeros():
    assert S.tuple_countable({}, ZERO).as_upname() == ZERO


def test_tuple_single_component():
    t = S.tuple_countable({0: ONE}, ZERO)
    positions = {S.cantor_pair(0, k) for k in range(20)}
    for m in range(max(positions) + 1):
        assert t.at(m) == (1 if m in positions else 0)
    assert t.as_upname() is None


@settings(max_examples=100)
@given(st.dictionaries(st.integers(0, 5), names(), max_size=4), names(),
       st.integers(0, 8))
def test_proj_i_inverse(components, default, i):
    t = S.tuple_countable(components, default)
    assert S.proj_i(t, i) == components.get(i, default)


# -- shifts and completion -----------------------------------------------------


def test_shift_minus():
    assert S.shift_minus(parse_upname("3,1,0,2;(2)")) == parse_upname("2,0,1;(1)")
    assert S.shift_minus(ZERO) == FiniteWord([])


@given(names())
def test_shift_inverse(p):
    assert S.shift_minus(S.shift_plus(p)) == p


@given(names())
def test_shift_minus_drops_zeros(p):
    q = S.shift_minus(p)
    nonzero = [x - 1 for x in p.prefix(40) if x > 0]
    if isinstance(q, FiniteWord):
        assert tuple(q) == tuple(nonzero)
    else:
        assert q.prefix(len(nonzero)) == tuple(nonzero)


def test_completion_decoding():
    baire = S.completion_space(S.BAIRE)
    assert baire.decode(ZERO) is BOTTOM
    q = parse_upname("4;(0,2)")
    assert baire.decode(S.shift_plus(q)) == q
    nat = S.completion_space(S.NAT)
    assert nat.decode(parse_upname("0,0,3;(1)")) == 2


def test_cantor_completion_rejects_non_binary():
    assert S.completion_space(S.CANTOR).decode(parse_upname(";(3)")) is BOTTOM


# -- transformers --------------------------------------------------------------


@given(names())
def test_totalize_identity(p):
    G = S.totalize(S.IDENTITY)
    assert S.shift_minus(G.apply(p)) == p


def test_totalize_stalling():
    G = S.totalize(S.PrefixTransformer(None, lambda s, x: (s, ()), "never"))
    out = G.apply(parse_upname("1;(2)"))
    assert out == ZERO
    assert S.decode_completion(S.BAIRE, out) is BOTTOM


def test_totalize_emit_once():
    G = S.totalize(S.emit_then_stall([5]))
    assert S.shift_minus(G.apply(ONE)) == FiniteWord([5])


def test_totalize_without_lift_keeps_symbols():
    F = S.emit_then_stall([5])
    G = S.totalize(F, lift=False)
    assert S.shift_minus(G.apply(ONE)) == FiniteWord([4])


@settings(max_examples=200)
@given(names(), st.integers(0, 2**32))
def test_transducer_apply_matches_prefix(p, seed):
    F = S.random_transducer(random.Random(seed))
    out = F.apply(p)
    n = 30
    emitted = F.prefix(p.prefix(n))
    if isinstance(out, FiniteWord):
        assert emitted == tuple(out)[: len(emitted)]
    else:
        assert emitted == out.prefix(len(emitted))


@settings(max_examples=200)
@given(names(), st.integers(1, 40))
def test_prefix_monotone(p, n):
    F = S.random_transducer(random.Random(n))
    a = F.prefix(p.prefix(n))
    b = F.prefix(p.prefix(n + 5))
    assert b[: len(a)] == a


@given(names())
def test_wbwt_k_apply_matches_prefix(p):
    K = S.wbwt_k()
    q = K.apply(p)
    assert q.prefix(80) == K.prefix(p.prefix(80))


def test_wbwt_k_majority():
    K = S.wbwt_k()
    # ones and twos tie at first, then twos dominate
    assert K.apply(parse_upname("0,1,2;(0,2)")).prefix(6) == (0, 0, 1, 0, 1, 1)


def test_antitone_k():
    K = S.antitone_k()
    assert K.prefix((0, 2)) == (0, 1, 0, 0, 0, 1)
    assert K.apply(parse_upname(";(1)")) == parse_upname(";(0,0,1)")


# -- problems ----------------------------------------------------------------


def test_lpo():
    assert S.lpo(ONE) == 1
    assert S.lpo(parse_upname("1,1,0;(1)")) == 0


def test_sort():
    assert S.sort_problem(parse_upname("0,1,0;(1)")) == parse_upname("0,0;(1)")
    assert S.sort_problem(ZERO) == ZERO
    with pytest.raises(S.StreamError):
        S.sort_problem(parse_upname(";(2)"))


def test_acc():
    assert S.acc_x(2, ZERO) == {0, 1}
    assert S.acc_x(2, parse_upname("0,2;(0)")) == {0}
    excluded = S.acc_x(S.OMEGA, parse_upname(";(4)"))
    assert 3 not in excluded and 0 in excluded and 100 in excluded
    with pytest.raises(S.StreamError):
        S.acc_x(2, parse_upname("1,2;(0)"))


def test_lpo_witness():
    _, K = S.completeness_witness("LPO")
    assert K.apply(UPName.const(2)) == ONE
    q = parse_upname("3,0;(1,0)")
    # K marks the zeros of q exactly where p = q + 1 has a 1
    assert K.apply(S.shift_plus(q)).prefix(10) == tuple(0 if x == 0 else 1 for x in q.prefix(10))


def test_acc2_witness():
    _, K = S.completeness_witness("ACC_2")
    assert K.apply(parse_upname("1,1,3;(1)")) == parse_upname("0,0,2;(0)")


@pytest.mark.parametrize("name", ["LPO", "SORT", "ACC_2", "ACC_N"])
def test_completeness_witness_random(name):
    rng = random.Random(11)
    samples = [S.random_upname(rng) for _ in range(50)] + [ZERO, ONE, parse_upname("1;(0)")]
    f = S.PROBLEMS[name]
    H, K = S.completeness_witness(name)
    rep = S.check_reduction(S.completion(f), f, H, K, samples)
    assert rep.ok, str(rep)


def test_sort_witness_on_named_inputs():
    H, K = S.completeness_witness("SORT")
    samples = [S.shift_plus(ONE), S.shift_plus(ZERO), parse_upname("1,2,1;(2,1)"), ZERO]
    rep = S.check_reduction(S.completion(S.SORT), S.SORT, H, K, samples)
    assert rep.ok and rep.checked == 4


def test_corrupted_output_translation_fails():
    _, K = S.completeness_witness("LPO")
    rep = S.check_reduction(S.completion(S.LPO), S.LPO, S.IDENTITY, K,
                            S.all_upnames(2, 2, 2))
    assert not rep.ok
    # failures are inputs in the domain: there the missing +1 shifts the answer
    assert all(S.completion_space(S.BAIRE).decode(p) is not BOTTOM for p, _ in rep.failures)


def test_check_reduction_rejects_bad_samples():
    H, K = S.completeness_witness("LPO")
    with pytest.raises(S.StreamError):
        S.check_reduction(S.LPO, S.LPO, H, K, [(0, 1)])


def test_all_upnames_count():
    names_ = S.all_upnames(4, 3, 3)
    assert len(names_) == len(set(names_)) == 19456
