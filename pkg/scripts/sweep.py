"""Seeded random sweep over the weakly orthogonal fixtures.

For each fixture: orthogonalize random development pairs, tally which cases fire,
and check depth-lift bounds on random parallel pairs.
"""

import argparse
import collections
import random
import sys
from dataclasses import dataclass

from wotrs import fixtures
from wotrs.errors import InvariantViolation
from wotrs.orthogonalize import orthogonalize_developments
from wotrs.projection import depth_lift_bound
from wotrs.randgen import random_pair
from wotrs.redex import develop
from wotrs.terms import eq_to_depth


@dataclass
class SweepConfig:
    seed: int = 0
    pairs: int = 500
    size: int = 9
    depth: int = 12


def sweep(name: str, cfg: SweepConfig):
    trs = fixtures.trs(name)
    rng = random.Random(f"{cfg.seed}-{name}")
    cases, broken, exhausted, lift_bad = collections.Counter(), 0, 0, 0
    for _ in range(cfg.pairs):
        U, V = random_pair(rng, trs, cfg.size)
        res = orthogonalize_developments(trs, U, V, cfg.depth)
        cases.update(e.case for e in res.trace)
        exhausted += res.exhausted
        t = U.source
        for a, b in ((U, res.U), (V, res.V)):
            broken += not eq_to_depth(develop(t, a.redexes, cfg.depth), develop(t, b.redexes, cfg.depth), cfg.depth)
        a, b = random_pair(rng, trs, cfg.size, kind="parallel", rational=0.0)
        try:
            depth_lift_bound(trs, a, b)
        except InvariantViolation:
            lift_bad += 1
    return cases, broken, exhausted, lift_bad


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    for k, v in vars(SweepConfig()).items():
        ap.add_argument(f"--{k}", type=int, default=v)
    ap.add_argument("fixtures", nargs="*", default=list(fixtures.WO_FIXTURES))
    ns = vars(ap.parse_args(argv))
    names = ns.pop("fixtures")
    cfg = SweepConfig(**ns)
    print(f"config: {cfg}")
    failed = False
    for name in names:
        cases, broken, exhausted, lift_bad = sweep(name, cfg)
        tally = " ".join(f"{c}={cases[c]}" for c in ("i", "ii", "iii", "iv"))
        print(f"{name:9} cases {tally}; budget hit {exhausted}; targets changed {broken}; lift violations {lift_bad}")
        failed |= bool(broken or lift_bad)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
