"""Search small SP terms for a triple of parallel steps violating the cube identity.

Prints the first failing triple in size order and checks it against the pinned fixture.
"""

import argparse
import itertools
import sys
from dataclasses import dataclass

from wotrs import fixtures
from wotrs.projection import check_cube
from wotrs.redex import ParallelStep, RedexSet, find_redexes
from wotrs.terms import disjoint, parse_term


@dataclass
class SearchConfig:
    system: str = "sp"
    max_height: int = 5


def sp_terms(height, signature):
    """Unary terms over S/P ending in x, shortest first."""
    for n in range(1, height + 1):
        for letters in itertools.product("SP", repeat=n):
            yield parse_term("".join(f"{c}(" for c in letters) + "x" + ")" * n, signature)


def parallel_steps(trs, t):
    rs = find_redexes(trs, t, 99)
    for k in range(1, len(rs) + 1):
        for combo in itertools.combinations(rs, k):
            if all(disjoint(a.position, b.position) for a, b in itertools.combinations(combo, 2)):
                yield ParallelStep(t, RedexSet(frozenset(combo)))


def search(cfg: SearchConfig):
    trs = fixtures.trs(cfg.system)
    for t in sp_terms(cfg.max_height, trs.signature):
        steps = list(parallel_steps(trs, t))
        for a, b, c in itertools.product(steps, repeat=3):
            rep = check_cube(trs, a, b, c)
            if not rep.holds:
                return (a, b, c), rep
    return None, None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-height", type=int, default=SearchConfig.max_height)
    cfg = SearchConfig(max_height=ap.parse_args(argv).max_height)
    triple, rep = search(cfg)
    if triple is None:
        print(f"no failing triple up to height {cfg.max_height}")
        return 1
    a, b, c = triple
    print(f"term:  {a.source}")
    print(f"alpha: {a.redexes}\nbeta:  {b.redexes}\ngamma: {c.redexes}")
    print(f"(alpha/beta)/(gamma/beta) = {rep.left}")
    print(f"(alpha/gamma)/(beta/gamma) = {rep.right}")
    pa, pb, pc = fixtures.cube_triple()
    # the identity is symmetric in beta and gamma
    same = (a.source == pa.source and a.redexes == pa.redexes
            and {b.redexes, c.redexes} == {pb.redexes, pc.redexes})
    print(f"matches pinned fixture: {'yes' if same else 'no'}")
    print(f"pinned triple fails: {'yes' if not check_cube(fixtures.trs(cfg.system), pa, pb, pc).holds else 'no'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
