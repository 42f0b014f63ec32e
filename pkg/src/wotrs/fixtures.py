"""Built-in systems, terms and sequences used by tests, scripts and the CLI."""

from __future__ import annotations

from functools import lru_cache
from importlib.resources import files

from .redex import Development, ParallelStep, Redex, RedexSet
from .sequences import SegmentedSequence, parse_sequence
from .terms import Term, parse_pos, parse_term
from .trs import TRS, parse_trs

TRS_NAMES = ("sp", "sp_e", "a3", "or", "or_c", "collapse", "swap", "hk", "loop")
WO_FIXTURES = ("sp", "a3", "swap", "or", "or_c", "collapse")


def data_path(name: str):
    return files("wotrs") / "data" / name


@lru_cache(maxsize=None)
def trs(name: str) -> TRS:
    return parse_trs(data_path(f"{name}.trs").read_text(encoding="utf-8"))


def sequence(name: str, system: str) -> SegmentedSequence:
    return parse_sequence(data_path(f"{name}.seq").read_text(encoding="utf-8"), trs(system))


def term(text: str, system: str | None = None, binders: dict | None = None) -> Term:
    return parse_term(text, trs(system).signature if system else None, binders=binders)


def redexes(system: str, *items: str) -> RedexSet:
    """``redexes("sp", "ε:SP", "1.1:SP")``."""
    T = trs(system)
    out = []
    for it in items:
        pos, _, rule = it.rpartition(":")
        out.append(Redex(parse_pos(pos), T.rule(rule)))
    return RedexSet(frozenset(out))


def swap_term() -> Term:
    return term("f(g(a,a))", "swap")


def a_omega_pair():
    """A^ω with the markings every third position from 0 (first) and from 1 (second)."""
    b: dict = {}
    t = term("rec X = A(rec Y = A(rec Z = A(X)))", "a3", b)
    rule = trs("a3").rule("AAA")
    first = Development(t, RedexSet(periodic=frozenset({(b["X"], rule)})))
    second = Development(t, RedexSet(periodic=frozenset({(b["Y"], rule)})))
    return t, first, second


def overlap_ladder():
    """SP developments whose top-down orthogonalization runs through several cases."""
    t = term("f(S(P(S(P(S(x))))), S(P(y)))", None)
    T = trs("sp")
    U = Development(t, redexes("sp", "1:SP", "1.1.1:SP"))
    V = Development(t, redexes("sp", "1.1:PS", "2:SP", "1.1.1.1:PS"))
    return T, U, V


def cube_triple():
    """Three co-initial SP steps for which the cube identity fails."""
    t = term("S(P(S(P(x))))", "sp")
    a = ParallelStep(t, redexes("sp", "ε:SP"))
    b = ParallelStep(t, redexes("sp", "1.1:SP"))
    c = ParallelStep(t, redexes("sp", "1:PS"))
    return a, b, c


def collapse_counterexample():
    """s = rec X = f(f(X,b),a) and the two limits t1, t2 of its collapsing reductions."""
    s = term("rec X = f(f(X, b), a)", "collapse")
    t1 = term("rec Y = f(Y, a)", "collapse")
    t2 = term("rec Z = f(Z, b)", "collapse")
    return s, t1, t2
