import pytest

import oracles
from wotrs import fixtures
from wotrs.errors import ModulusUnavailable, NotARedex, ParseError
from wotrs.redex import Redex
from wotrs.sequences import FiniteSequence, as_single, parse_sequence, spine
from wotrs.terms import eq_to_depth, parse_term

HK = fixtures.trs("hk")


def test_parse_fixture_files():
    s = fixtures.sequence("omega2", "hk")
    assert str(s.order_type()) == "ω+2"
    assert s.source == parse_term("h(a)")
    assert s.target == parse_term("k2(rec X = g(X))")
    assert str(fixtures.sequence("divergent", "loop").order_type()) == "ω·2"
    assert str(fixtures.sequence("or_root", "or_c").order_type()) == "1"


def test_spine_modulus_is_honest():
    seq = as_single(fixtures.sequence("or_left", "or_c"))
    for d in range(10):
        m = seq.mod(d)
        assert all(seq.depth_of(i) > d for i in range(m, m + 30))
        assert seq.check_limit(d)


def test_replay_matches_tree_oracle():
    seq = as_single(fixtures.sequence("or_left", "or_c"))
    rules = oracles.rules_of(fixtures.trs("or_c"))
    tr = oracles.tree(seq.source)
    for i in range(12):
        r = seq.redex_at(i)
        tr = oracles.rewrite(tr, r.position, *rules[r.rule.name])
        assert oracles.tree(seq.term(i + 1)) == tr


def test_min_depth_and_counts():
    seq = fixtures.sequence("omega1", "hk")
    assert seq.min_depth() == 0 and seq.count_at(0) == 1
    om = as_single(fixtures.sequence("or_left", "or_c"))
    assert om.min_depth() == 1 and om.count_at(1) == 1


def test_finite_sequence_validates():
    with pytest.raises(NotARedex):
        FiniteSequence(parse_term("h(a)"), [Redex((), HK.rule("kk"))])


def test_missing_modulus():
    seq = fixtures.sequence("divergent", "loop")
    with pytest.raises(ModulusUnavailable):
        seq.segments[-1].mod(3)
    om = spine(HK, parse_term("h(a)"), (1,), (1,), ["ag"], 1)
    with pytest.raises(ModulusUnavailable):
        om.target


@pytest.mark.parametrize("text", [
    "seq: step ε:hk",
    "source: h(a)\nseq: step ε:nope",
    "source: h(a)\nomega: gen=zigzag",
    "source: h(a)\nomega: gen=spine modulus=sqrt",
    "source: h(a)\nloop: forever",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_sequence(text, HK)


def test_tail_keeps_limit():
    om = as_single(fixtures.sequence("or_left", "or_c"))
    tail = om.tail(5)
    assert tail.source == om.term(5)
    assert eq_to_depth(tail.term(tail.mod(8)), om.target, 8)
