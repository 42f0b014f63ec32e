"""Acceptance criteria, one check per criterion.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``;
either prints one PASS/FAIL line per criterion.
"""

import itertools
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from wotrs import fixtures  # noqa: E402
from wotrs.compression import compress, compress_divergent  # noqa: E402
from wotrs.errors import CollapsingRulesPresent  # noqa: E402
from wotrs.orthogonalize import conflict_frontier, drop_y_redexes, orthogonalize_developments  # noqa: E402
from wotrs.projection import (approx_equal, check_cube, common_reduct_search, confluence_join,  # noqa: E402
                              diamond_join, is_unit, strip, unit, wo_project)
from wotrs.randgen import random_pair  # noqa: E402
from wotrs.redex import (Development, ParallelStep, Redex, RedexSet, apply_step, develop,  # noqa: E402
                         find_redexes, overlap)
from wotrs.sequences import FiniteSequence  # noqa: E402
from wotrs.sp import (EventuallyPeriodic, classify, heights, make_q, make_r, parse_word,  # noqa: E402
                      reduce_toward, word_term)
from wotrs.terms import disjoint, eq_to_depth, parse_term  # noqa: E402
from wotrs.trs import critical_pairs, from_tree, is_orthogonal, is_weakly_orthogonal  # noqa: E402

INF = float("inf")


def parallel_steps(trs, t):
    rs = find_redexes(trs, t, 99)
    out = []
    for k in range(len(rs) + 1):
        for combo in itertools.combinations(rs, k):
            if all(disjoint(a.position, b.position) for a, b in itertools.combinations(combo, 2)):
                out.append(ParallelStep(t, RedexSet(frozenset(combo))))
    return out


def cp_shape(trs, d=12):
    return sorted((c.outer_rule, c.inner_rule, c.position)
                  + oracles.normalize(*(oracles.tree(u, d) for u in (c.peak, c.left_reduct, c.right_reduct)))
                  for c in critical_pairs(trs))


def oracle_shape(trs, d=12):
    rules = [(r.name, oracles.tree(r.lhs), oracles.tree(r.rhs, 2 * d)) for r in trs.rules]
    return sorted(c[:3] + tuple(oracles.cut(u, d) for u in c[3:]) for c in oracles.critical_peaks(rules))


def c1():
    notes, ok = [], True
    for name in ("sp", "a3"):
        trs = fixtures.trs(name)
        cps = critical_pairs(trs)
        good = (is_weakly_orthogonal(trs).ok and len(cps) == 2 and all(c.trivial for c in cps)
                and cp_shape(trs) == oracle_shape(trs))
        ok &= good
        notes.append(f"{name}: {len(cps)} trivial CPs")
    col = fixtures.trs("collapse")
    ok &= is_orthogonal(col) and not critical_pairs(col) and oracle_shape(col) == []
    v = is_weakly_orthogonal(fixtures.trs("sp_e"))
    w = v.witness
    ok &= (not v.ok and w is not None
           and oracles.normalize(oracles.tree(w.left_reduct), oracles.tree(w.right_reduct))
           == oracles.normalize(oracles.parse("e(P(y))"), oracles.parse("P(e(y))"))
           and cp_shape(fixtures.trs("sp_e")) == oracle_shape(fixtures.trs("sp_e")))
    notes.append(f"collapse orthogonal; sp_e witness {w.left_reduct} / {w.right_reduct}")
    return ok, "; ".join(notes)


def c2():
    checked = violations = 0
    for name in ("sp", "a3", "swap"):
        trs = fixtures.trs(name)
        rules = oracles.rules_of(trs)
        for tr in oracles.all_trees(trs.signature.symbols, 8):
            t = from_tree(tr)
            violations += len(oracles.same_effect_violations(rules, tr))
            rs = find_redexes(trs, t, 99)
            for a, b in itertools.combinations(rs, 2):
                if overlap(a, b):
                    checked += 1
                    violations += apply_step(t, a) != apply_step(t, b)
    return violations == 0, f"{checked} overlapping pairs on all terms of size <= 8, {violations} violations"


def ortho_violations(trs, U, V, d=12):
    res = orthogonalize_developments(trs, U, V, d)
    t, bad = U.source, 0
    for before, after in ((U, res.U), (V, res.V)):
        bad += not eq_to_depth(develop(t, before.redexes, d), develop(t, after.redexes, d), d)
    bad += conflict_frontier(res.U.redexes.materialize(t, d), res.V.redexes.materialize(t, d)) < d
    depths = [e.depth for e in res.trace]
    bad += depths != sorted(depths)
    return bad


def c3():
    total = bad = 0
    for name in fixtures.WO_FIXTURES:
        trs = fixtures.trs(name)
        rng = random.Random(f"c3-{name}")
        for _ in range(200):
            U, V = random_pair(rng, trs, 9)
            bad += ortho_violations(trs, U, V)
            total += 1
    return bad == 0, f"{total} pairs over {len(fixtures.WO_FIXTURES)} fixtures, {bad} violations"


def c4():
    t = fixtures.swap_term()
    ctx = RedexSet(frozenset(find_redexes(fixtures.trs("swap"), t, 3)))
    dev = Development(t, fixtures.redexes("swap", "ε:rho1"))
    out = drop_y_redexes(dev, ctx)
    ok = not out.redexes and out.target() == dev.target()
    bad = dropped = 0
    rng = random.Random("c4")
    for i in range(100):
        trs = fixtures.trs(fixtures.WO_FIXTURES[i % len(fixtures.WO_FIXTURES)])
        U, _ = random_pair(rng, trs, 9, rational=0.0)
        # the full redex set as context makes Y-redexes common
        kept = drop_y_redexes(U, RedexSet(frozenset(find_redexes(trs, U.source, 12))))
        dropped += len(U.redexes.explicit) - len(kept.redexes.explicit)
        bad += not eq_to_depth(develop(U.source, U.redexes, 12), develop(U.source, kept.redexes, 12), 12)
    return ok and bad == 0, f"u_ε dropped, target kept; 100 random developments, {dropped} dropped, {bad} changed"


def c5():
    sp = fixtures.trs("sp")
    count = bad = 0
    for tr in oracles.all_trees(sp.signature.symbols, 6):
        t = from_tree(tr)
        for a in parallel_steps(sp, t):
            count += 1
            bad += not is_unit(wo_project(sp, a, a))
            bad += not approx_equal(wo_project(sp, a, unit(t)), a)
            bad += not is_unit(wo_project(sp, unit(t), a))
    fails = not check_cube(sp, *fixtures.cube_triple()).holds
    col = fixtures.trs("collapse")
    triples = cube_bad = 0
    for tr in oracles.all_trees(col.signature.symbols, 5):
        steps = parallel_steps(col, from_tree(tr))
        for x, y, z in itertools.product(steps, repeat=3):
            triples += 1
            cube_bad += not check_cube(col, x, y, z).holds
    ok = bad == 0 and fails and cube_bad == 0
    return ok, (f"units on {count} SP steps, {bad} violations; pinned cube fails: {fails}; "
                f"{triples} collapse triples, {cube_bad} failures")


def lift_violations(trs, a, b, collapse_free):
    da, db = a.min_depth, b.min_depth
    ab, ba = wo_project(trs, a, b), wo_project(trs, b, a)
    if collapse_free:
        lo_ab, lo_ba = min(da, db + 1), min(db, da + 1)
    else:
        lo_ab = lo_ba = min(da, db)
    closes = ab.target() == ba.target()
    return (ab.min_depth < lo_ab) + (ba.min_depth < lo_ba) + (not closes)


def c6():
    bad = {}
    for name, cf in (("or", True), ("sp", False)):
        trs = fixtures.trs(name)
        rng = random.Random(f"c6-{name}")
        n = 0
        for _ in range(500):
            a, b = random_pair(rng, trs, 10, kind="parallel", rational=0.0)
            n += lift_violations(trs, a, b, cf)
        bad[name] = n
    return not any(bad.values()), f"500 or pairs: {bad['or']} violations; 500 SP pairs: {bad['sp']} violations"


def c7():
    trs = fixtures.trs("or_c")
    ok, notes = True, []
    for d in (4, 8, 12):
        start = time.perf_counter()
        seq = fixtures.sequence("or_strip", "or_c")
        res = strip(trs, seq, ParallelStep(seq.source, fixtures.redexes("or_c", "ε:o2")), d)
        good = eq_to_depth(res.left_end, res.right_end, d)
        j = confluence_join(trs, fixtures.sequence("or_left", "or_c"), fixtures.sequence("or_right", "or_c"), d)
        good &= eq_to_depth(j.u_left, j.u_right, d)
        j = confluence_join(trs, fixtures.sequence("or_root", "or_c"), fixtures.sequence("or_strip", "or_c"), d)
        good &= eq_to_depth(j.u_left, j.u_right, d)
        dt = time.perf_counter() - start
        ok &= good and dt < 10
        notes.append(f"d={d} {'closed' if good else 'open'} {dt:.2f}s")
    return ok, ", ".join(notes)


def c8():
    trs = fixtures.trs("collapse")
    s, t1, t2 = fixtures.collapse_counterexample()
    refused = 0
    dev = Development(s, RedexSet.of(Redex((), trs.rule("proj"))))
    try:
        diamond_join(trs, dev, dev, 4)
    except CollapsingRulesPresent:
        refused += 1
    seq = FiniteSequence(s, [Redex((), trs.rule("proj"))])
    try:
        confluence_join(trs, seq, seq, 4)
    except CollapsingRulesPresent:
        refused += 1
    pkg_none = common_reduct_search(trs, t1, t2, 3) is None
    rules = oracles.rules_of(trs)
    # cut deep enough that three steps cannot pull the cut above depth 6
    r1 = {oracles.cut(x, 6) for x in oracles.reducts_truncated(rules, oracles.tree(t1, 12), 3)}
    r2 = {oracles.cut(x, 6) for x in oracles.reducts_truncated(rules, oracles.tree(t2, 12), 3)}
    ok = (refused == 2 and pkg_none and not (r1 & r2)
          and t1 == parse_term("rec Y = f(Y,a)") and t2 == parse_term("rec Z = f(Z,b)"))
    return ok, f"{refused}/2 refusals; no common reduct within 3 steps (package and brute force)"


def c9():
    hk = fixtures.trs("hk")
    ok, notes = True, []
    for name, count in (("omega1", 1), ("omega2", 2)):
        seq = fixtures.sequence(name, "hk")
        rep = compress(hk, seq, 20)
        out = rep.output
        good = (rep.output_length == "ω" and out.source == seq.source and rep.min_depth == 0
                and rep.steps_at_d_in == rep.steps_at_d_out == count
                and eq_to_depth(out.term(out.mod(20)), seq.target, 20))
        ok &= good
        notes.append(f"{seq.order_type()} -> {rep.output_length}, {rep.steps_at_d_out} depth-0 step(s)")
    loop = fixtures.trs("loop")
    seq = fixtures.sequence("divergent", "loop")
    rep = compress_divergent(loop, seq, 30, witness=lambda j: (len(seq.segments) - 1, j))
    ok &= len(rep.steps) == 30 and rep.hits >= 10
    notes.append(f"divergent: {rep.hits} of 30 steps at depth {rep.depth}")
    return ok, "; ".join(notes)


def c10(sample=3000, exhaustive_head=5):
    W = parse_word
    pins = {W("(SP)^w"): (1, 0), W("S^w"): (INF, 0), W("P^w"): (0, -INF), make_q(): (INF, -INF),
            make_r(): (INF, 0)}
    ok = all(tuple(heights(w)) == h for w, h in pins.items())
    q, r = classify(make_q()), classify(make_r())
    ok &= q.in_A and q.in_B and q.root_active
    ok &= r.in_A and not r.in_B and r.root_active
    ok &= all(classify(W(x)).sn_inf for x in ("S^w", "P^w"))
    ws = reduce_toward(make_q(), "S", 25)
    wp = reduce_toward(make_q(), "P", 25)
    for w in (ws, wp):
        ok &= eq_to_depth(w.sequence().target, word_term(w.target * 25), 25)
    ok &= ws.end[:25] == "S" * 25 and wp.end[:25] == "P" * 25
    corpus = oracles.ep_corpus(random.Random("c10"), sample, exhaustive_head=exhaustive_head)
    bad = 0
    for head, period in corpus:
        h = heights(EventuallyPeriodic(head, period))
        bad += bool(oracles.crossval_ep(head, period, h.upper, h.lower))
    ok &= bad == 0
    return ok, (f"pins exact; witnesses of length {len(ws.start)}/{len(wp.start)} validated; "
                f"{len(corpus)} EP words (period <= 6: all heads <= {exhaustive_head}, "
                f"{sample} sampled heads <= 40), {bad} disagreements")


CRITERIA = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10]


def report(i, fn):
    start = time.perf_counter()
    ok, detail = fn()
    line = f"C{i} {'PASS' if ok else 'FAIL'} ({time.perf_counter() - start:.1f}s) {detail}"
    return ok, line


@pytest.mark.parametrize("i", range(1, 11))
def test_criterion(i, capsys):
    ok, line = report(i, CRITERIA[i - 1])
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report(i, fn) for i, fn in enumerate(CRITERIA, 1)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
