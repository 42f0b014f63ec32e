import itertools
import random

import hypothesis as hyp
import hypothesis.strategies as st
import pytest

import oracles
from wotrs.errors import InsufficientHeight, NoZeroFactorization
from wotrs.sp import (BlockSpec, EventuallyPeriodic, OracleBacked, classify, heights, make_q, make_r,
                      parse_word, reduce_toward, sp_trs, structure, sum_, sum_graph, word_term,
                      zero_word_factorization)
from wotrs.terms import eq_to_depth, parse_term

INF = float("inf")
W = parse_word


def test_sums():
    assert [sum_(W("(SP)^w"), n) for n in range(1, 5)] == [1, 0, 1, 0]
    assert [sum_(W("S^w"), n) for n in range(1, 4)] == [1, 2, 3]
    assert [sum_(make_q(), n) for n in (1, 3, 6, 10, 15, 21)] == [1, -1, 2, -2, 3, -3]
    assert sum_(make_q(), 3) == -1 and sum_(make_q(), 0) == 0


def test_sum_graph():
    assert sum_graph(make_q(), 6) == [(0, 0), (1, 1), (2, 0), (3, -1), (4, 0), (5, 1), (6, 2)]
    assert sum_graph(make_q(), 0) == [(0, 0)]
    assert [s for _, s in sum_graph(W("P^w"), 3)] == [0, -1, -2, -3]


def test_constructors():
    assert make_q().prefix(6) == "SPPSSS"
    assert make_r().prefix(6) == "SPSSPP"
    assert make_q().prefix(21) == "S" + "PP" + "SSS" + "PPPP" + "SSSSS" + "PPPPPP"
    assert W("blocks:S:1+2k,2+2k").prefix(21) == make_q().prefix(21)
    assert W("blocks:P:2k+1").prefix(9) == "PSSSPPPPP"
    assert W("ep:SS:P").prefix(5) == "SSPPP"


def test_heights_pins():
    assert tuple(heights(W("(SP)^w"))) == (1, 0)
    assert tuple(heights(W("S^w"))) == (INF, 0)
    assert tuple(heights(W("P^w"))) == (0, -INF)
    assert tuple(heights(make_q())) == (INF, -INF)
    assert tuple(heights(make_r())) == (INF, 0)


def test_classification_pins():
    q, r = classify(make_q()), classify(make_r())
    assert q.in_A and q.in_B and q.root_active and not q.sn_inf
    assert r.in_A and not r.in_B and r.root_active
    for w in ("S^w", "P^w"):
        c = classify(W(w))
        assert c.sn_inf and not c.root_active
    assert classify(W("S^w")).in_A
    assert str(q) == "q: upper=+∞ lower=−∞ A=yes B=yes root_active=yes SN∞=no"


def test_oracle_backed_is_estimate():
    w = OracleBacked(lambda n: ("SP" * n)[:n], "alt")
    c = classify(w, evidence=64)
    assert not c.exact and c.root_active is None and c.upper_height == 1


def test_factorization():
    assert zero_word_factorization(W("(SP)^w"), 3) == ["SP", "SP", "SP"]
    assert zero_word_factorization(make_q(), 2) == ["SP", "PS"]
    with pytest.raises(NoZeroFactorization) as e:
        zero_word_factorization(W("S^w"), 1)
    assert e.value.factors == []


@pytest.mark.parametrize("w", ["q", "r", "(SP)^w", "ep:SSP:SP", "ep:SSP:SPPS", "ep:PPP:SS", "blocks:S:1+k,1+k,1", "S^w"])
def test_factorization_agrees_with_root_activity(w):
    word = W(w)
    if not classify(word).root_active:
        with pytest.raises(NoZeroFactorization):
            zero_word_factorization(word, 50)
        return
    factors = zero_word_factorization(word, 50)
    assert "".join(factors) == word.prefix(sum(map(len, factors)))
    assert all(f.count("S") == f.count("P") for f in factors)


@pytest.mark.parametrize("target, prefixes", [("S", [1, 6, 15]), ("P", [3, 10, 21])])
def test_minimal_prefixes(target, prefixes):
    for d, m in enumerate(prefixes, 1):
        w = reduce_toward(make_q(), target, d)
        assert len(w.start) == m
        assert w.end.startswith(target * d)
        # nothing shorter works, checked by exhaustive deletion search
        assert oracles.sp_bfs(make_q().prefix(m), target, d)
        assert not oracles.sp_bfs(make_q().prefix(m - 1), target, d)


def test_witnesses_at_25():
    q = make_q()
    s, p = reduce_toward(q, "S", 25), reduce_toward(q, "P", 25)
    assert (len(s.start), len(s.steps)) == (1225, 600)
    assert (len(p.start), len(p.steps)) == (1275, 625)
    for w in (s, p):
        seq = w.sequence()
        assert eq_to_depth(seq.target, word_term(w.target * 25), 25)
    assert s.end[:25] != p.end[:25]


def test_insufficient_height():
    with pytest.raises(InsufficientHeight):
        reduce_toward(W("(SP)^w"), "S", 2)
    assert reduce_toward(W("(SP)^w"), "S", 1).end.startswith("S")


def test_word_terms():
    assert W("(SP)^w").to_term() == parse_term("rec X = S(P(X))")
    assert W("ep:S:P").to_term() == parse_term("S(rec X = P(X))")
    assert make_q().to_term(4) == parse_term("S(P(P(S(▢))))")


def test_parse_errors():
    for bad in ("ep:SX:P", "blocks:Q:1", "zz", "ep:S:"):
        with pytest.raises(ValueError):
            W(bad)


def test_dp_oracle_matches_bfs():
    for n in range(1, 11):
        for letters in itertools.product("SP", repeat=n):
            w = "".join(letters)
            for t, d in itertools.product("SP", (1, 2, 3)):
                assert oracles.sp_bfs(w, t, d) == oracles.sp_decompose(w, t, d)


def test_crossval_sample():
    corpus = oracles.ep_corpus(random.Random(3), 200, exhaustive_head=2)
    for head, period in corpus:
        h = heights(EventuallyPeriodic(head, period))
        assert oracles.crossval_ep(head, period, h.upper, h.lower) == []


words = st.tuples(st.text("SP", max_size=12), st.text("SP", min_size=1, max_size=6))
linear = st.lists(st.tuples(st.integers(1, 4), st.integers(0, 3)), min_size=1, max_size=4)


@hyp.given(words)
def test_ep_invariants(hp):
    w = EventuallyPeriodic(*hp)
    walk = [s for _, s in sum_graph(w, 200)]
    assert all(abs(a - b) == 1 for a, b in zip(walk, walk[1:]))
    c = classify(w)
    assert not (c.sn_inf and c.root_active)
    assert c.in_A == (c.upper_height == INF) and c.in_B == (c.lower_height == -INF)
    if c.sn_inf is not None:
        assert c.sn_inf == (not c.root_active and ((c.upper_height == INF) != (c.lower_height == -INF)))
    if c.upper_height != INF:
        assert max(walk) == c.upper_height
    if c.lower_height != -INF:
        assert min(walk) == c.lower_height


@hyp.given(linear, st.sampled_from("SP"))
def test_block_invariants(blocks, first):
    c, s = zip(*blocks)
    w = BlockSpec.from_linear(c, s, first)
    st_ = structure(w)
    assert st_ is not None
    cl = classify(w)
    assert not (cl.sn_inf and cl.root_active)
    walk = [v for _, v in sum_graph(w, 3000)]
    if cl.upper_height != INF:
        assert max(walk) == cl.upper_height
    else:
        assert oracles.sp_decompose(w.prefix(3000), "S", 5)
    if cl.lower_height != -INF:
        assert min(walk) == cl.lower_height
    else:
        assert oracles.sp_decompose(w.prefix(3000), "P", 5)
    if cl.root_active:
        assert 0 in walk[1500:]


def test_sp_trs_rules():
    trs = sp_trs()
    assert {r.name for r in trs.rules} == {"SP", "PS"}
