"""Seeded random terms, redex sets, steps and developments for property sweeps."""

from __future__ import annotations

import random

from .redex import Development, ParallelStep, RedexSet, find_redexes, overlap
from .terms import Builder, Term, disjoint, node_path
from .trs import TRS


def random_term(rng: random.Random, trs: TRS, size: int, variables=("x", "y")) -> Term:
    """A finite term with about ``size`` function nodes, seeded with rule left-hand sides."""
    sig = trs.signature.symbols
    funs = [f for f, a in sig.items() if a > 0]
    consts = [f for f, a in sig.items() if a == 0]
    b = Builder()

    def _leaf():
        if consts and (not variables or rng.random() < 0.6):
            return b.add(rng.choice(consts))
        return b.add(rng.choice(variables), None)

    def build(budget):
        if budget <= 0 or not funs:
            return _leaf()
        if rng.random() < 0.35 and trs.rules:
            rule = rng.choice(trs.rules)
            lhs = rule.lhs
            if lhs.height() < budget + 1:
                subst = {x: build(rng.randint(0, max(0, budget - lhs.height()) // 2))
                         for x in lhs.variables()}
                return _instantiate(b, lhs, subst)
        f = rng.choice(funs)
        k = sig[f]
        rest = budget - 1
        shares = [rng.randint(0, rest) for _ in range(k)]
        total = sum(shares) or 1
        return b.add(f, [build(rest * s // total) for s in shares])

    return b.term(build(size))


def _instantiate(b: Builder, pattern: Term, subst: dict) -> int:
    def go(n):
        sym, kids = pattern.nodes[n]
        if kids is None:
            return subst[sym]
        return b.add(sym, [go(k) for k in kids])
    return go(pattern.root)


def random_rational(rng: random.Random, trs: TRS, size: int) -> Term:
    """Tie one leaf of a random finite term back to one of its function-node ancestors."""
    t = random_term(rng, trs, size)
    leaves = [p for p, n in t.positions() if not t.nodes[n][1] and p]
    if not leaves:
        return t
    p = rng.choice(leaves)
    path = node_path(t, p)
    b = Builder()
    b.embed(t)
    # the copied path is fresh, so the back edge redirects only this occurrence
    new_path = [b.add(*t.nodes[n]) for n in path[:-1]]
    target = new_path[rng.randrange(len(new_path))]
    for i, n in enumerate(new_path):
        kids = list(b.nodes[n][1])
        kids[p[i] - 1] = new_path[i + 1] if i + 1 < len(new_path) else target
        b.nodes[n] = (b.nodes[n][0], tuple(kids))
    return b.term(new_path[0])


def random_development(rng: random.Random, trs: TRS, t: Term, depth: int = 8, keep: float = 0.6) -> Development:
    """A random set of pairwise non-overlapping redexes (finite, depth < ``depth``)."""
    cands = find_redexes(trs, t, depth)
    rng.shuffle(cands)
    chosen = []
    for r in cands:
        if rng.random() < keep and not any(overlap(r, c) for c in chosen):
            chosen.append(r)
    return Development(t, RedexSet(frozenset(chosen)))


def random_parallel(rng: random.Random, trs: TRS, t: Term, depth: int = 8, keep: float = 0.6) -> ParallelStep:
    """A random set of pairwise disjoint redexes."""
    cands = find_redexes(trs, t, depth)
    rng.shuffle(cands)
    chosen = []
    for r in cands:
        if rng.random() < keep and all(disjoint(r.position, c.position) for c in chosen):
            chosen.append(r)
    return ParallelStep(t, RedexSet(frozenset(chosen)))


def random_pair(rng: random.Random, trs: TRS, size: int, kind: str = "development", rational: float = 0.25,
                depth: int = 8):
    """A random co-initial pair; kind is ``development`` or ``parallel``."""
    make = random_development if kind == "development" else random_parallel
    t = random_rational(rng, trs, size) if rng.random() < rational else random_term(rng, trs, size)
    return make(rng, trs, t, depth), make(rng, trs, t, depth)
