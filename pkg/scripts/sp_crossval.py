"""Cross-check S/P heights against brute-force reachability on eventually periodic words.

The brute-force side lives in tests/oracles.py and never calls the height analysis.
"""

import argparse
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import oracles  # noqa: E402
from wotrs.sp import EventuallyPeriodic, heights  # noqa: E402


@dataclass
class CrossvalConfig:
    seed: int = 0
    sample: int = 3000
    max_head: int = 40
    max_period: int = 6
    exhaustive_head: int = 5
    depth: int = 6


def run(cfg: CrossvalConfig):
    rng = random.Random(cfg.seed)
    corpus = oracles.ep_corpus(rng, cfg.sample, cfg.max_head, cfg.max_period, cfg.exhaustive_head)
    bad = []
    for head, period in corpus:
        h = heights(EventuallyPeriodic(head, period))
        diff = oracles.crossval_ep(head, period, h.upper, h.lower, cfg.depth)
        if diff:
            bad.append((head, period, diff))
    return corpus, bad


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(CrossvalConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = CrossvalConfig(**vars(ap.parse_args(argv)))
    print(f"config: {cfg}")
    start = time.perf_counter()
    corpus, bad = run(cfg)
    print(f"{len(corpus)} words, {len(bad)} disagreements, {time.perf_counter() - start:.1f}s")
    for head, period, diff in bad[:20]:
        print(f"  {head}({period})^w: {diff}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
