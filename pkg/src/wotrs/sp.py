"""Infinite unary S/P words: sum walks, heights, classes, zero words, reduction witnesses."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import BudgetExhausted, InsufficientHeight, NoZeroFactorization
from .redex import Redex
from .sequences import FiniteSequence
from .terms import CUT, Term
from .trs import TRS, make_trs

INF = float("inf")
LETTERS = "SP"


def sp_trs() -> TRS:
    return make_trs({"SP": "S(P(x)) -> x", "PS": "P(S(x)) -> x"})


# -- words ------------------------------------------------------------------------


class SPWord:
    """An infinite word over {S, P}; subclasses supply letters."""

    name = "word"

    def prefix(self, n: int) -> str:
        raise NotImplementedError

    def letter(self, n: int) -> str:
        return self.prefix(n + 1)[n]

    def checkpoints(self, k: int) -> list[int] | None:
        """Indices bounding cycle k (monotone walk in between), or None if not analyzable.

        The walk's value at the i-th checkpoint of cycle k is a polynomial of
        degree <= 2 in k; the first checkpoint of cycle k+1 is the last of cycle k.
        """
        return None

    def to_term(self, depth: int | None = None) -> Term:
        """Unary term; exact for rational words, else the prefix of length ``depth`` over CUT."""
        if depth is None:
            raise BudgetExhausted(f"{self} is not rational; give a depth")
        return word_term(self.prefix(depth), tail=CUT)

    def __str__(self):
        return self.name


class EventuallyPeriodic(SPWord):
    def __init__(self, prefix: str, period: str):
        if not period or set(prefix + period) - set(LETTERS):
            raise ValueError("need a non-empty period over S, P")
        self.head, self.period = prefix, period
        self.name = f"ep:{prefix}:{period}"

    def prefix(self, n: int) -> str:
        h = self.head
        if n <= len(h):
            return h[:n]
        m = n - len(h)
        return h + self.period * (m // len(self.period)) + self.period[: m % len(self.period)]

    def checkpoints(self, k: int) -> list[int]:
        L = len(self.period)
        start = len(self.head) + k * L
        return list(range(start, start + L + 1))

    def to_term(self, depth: int | None = None) -> Term:
        nodes = [(c, (i + 1,)) for i, c in enumerate(self.head + self.period)]
        loop = len(self.head)
        last = len(nodes) - 1
        nodes[last] = (nodes[last][0], (loop,))
        return Term(nodes, 0)._gc()


class BlockSpec(SPWord):
    """Alternating blocks; block j has length ``block_length(j)`` (j from 0).

    ``linear=(c, s)`` declares block j = c[j % L] + s[j % L] * (j // L), which
    makes heights and classes decidable.
    """

    def __init__(self, block_length: Callable[[int], int], first: str = "S",
                 linear: tuple | None = None, name: str = "blocks"):
        if first not in LETTERS:
            raise ValueError("first letter must be S or P")
        self.block_length = block_length
        self.first = first
        self.name = name
        self.linear = None
        if linear is not None:
            c, s = map(tuple, linear)
            if len(c) != len(s) or not c or min(c) < 1 or min(s) < 0:
                raise ValueError("linear blocks need positive constants and non-negative slopes")
            if len(c) % 2:
                # an even number of blocks per cycle keeps the letters in phase
                L = len(c)
                c, s = (tuple(c[i % L] + s[i % L] * (i // L) for i in range(2 * L)),
                        tuple(2 * s[i % L] for i in range(2 * L)))
            self.linear = (c, s)
        self._text = ""
        self._bounds = [0]

    @classmethod
    def from_linear(cls, c, s, first="S", name="blocks"):
        L = len(c)
        return cls(lambda j: c[j % L] + s[j % L] * (j // L), first, (c, s), name)

    def _block_letter(self, j: int) -> str:
        return self.first if j % 2 == 0 else ("P" if self.first == "S" else "S")

    def _extend(self, n: int):
        parts = [self._text]
        size = len(self._text)
        while size < n:
            j = len(self._bounds) - 1
            b = self.block_length(j)
            if b < 1:
                raise ValueError(f"block {j} has length {b}")
            parts.append(self._block_letter(j) * b)
            size += b
            self._bounds.append(size)
        self._text = "".join(parts)

    def prefix(self, n: int) -> str:
        self._extend(n)
        return self._text[:n]

    def block_start(self, j: int) -> int:
        while len(self._bounds) <= j:
            self._extend(len(self._text) + 1)
        return self._bounds[j]

    def checkpoints(self, k: int) -> list[int] | None:
        if self.linear is None:
            return None
        L = len(self.linear[0])
        return [self.block_start(k * L + i) for i in range(L + 1)]


class OracleBacked(SPWord):
    def __init__(self, prefix_fn: Callable[[int], str], name: str = "oracle"):
        self.fn = prefix_fn
        self.name = name

    def prefix(self, n: int) -> str:
        w = self.fn(n)
        if len(w) != n or set(w) - set(LETTERS):
            raise ValueError(f"oracle returned a bad prefix of length {n}")
        return w


def make_q() -> BlockSpec:
    """S PP SSS PPPP ..."""
    return BlockSpec.from_linear((1, 2), (2, 2), "S", "q")


def make_r() -> BlockSpec:
    """S P SS PP SSS PPP ..."""
    return BlockSpec.from_linear((1, 1), (1, 1), "S", "r")


def word_term(letters: str, tail: str = CUT) -> Term:
    nodes = [(c, (i + 1,)) for i, c in enumerate(letters)]
    nodes.append((tail, ()))
    return Term(nodes, 0)


_BLOCKS = re.compile(r"blocks:([SP]):(.+)")
_TERM = re.compile(r"(\d*)(k?)")


def _linear(text: str) -> tuple[int, int]:
    """``a+bk`` in any order -> (a, b)."""
    a = b = 0
    for part in text.replace(" ", "").split("+"):
        m = _TERM.fullmatch(part)
        if not part or not m:
            raise ValueError(f"bad block length {text!r}")
        if m.group(2):
            b += int(m.group(1) or 1)
        else:
            a += int(m.group(1))
    return a, b


def parse_word(text: str) -> SPWord:
    """``q``, ``r``, ``ep:<prefix>:<period>``, ``blocks:S:1+2k,2+2k``, ``(SP)^w``, ``S^w``."""
    t = text.strip().replace("ω", "w")
    if t == "q":
        return make_q()
    if t == "r":
        return make_r()
    if t.startswith("ep:"):
        _, pre, per = (t.split(":") + [""])[:3]
        return EventuallyPeriodic(pre, per)
    m = _BLOCKS.fullmatch(t)
    if m:
        c, s = zip(*(_linear(item) for item in m.group(2).split(",")))
        return BlockSpec.from_linear(tuple(c), tuple(s), m.group(1), t)
    m = re.fullmatch(r"([SP]*)(?:\(([SP]+)\)|([SP]))\^w", t)
    if m:
        w = EventuallyPeriodic(m.group(1), m.group(2) or m.group(3))
        w.name = text.strip()
        return w
    raise ValueError(f"unknown word literal {text!r}")


# -- walks ------------------------------------------------------------------------


def sum_(w: SPWord, n: int) -> int:
    """S counts +1, P counts -1, over the first n letters."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p = w.prefix(n)
    return p.count("S") - p.count("P")


def sum_graph(w: SPWord, n: int) -> list[tuple[int, int]]:
    out, s = [(0, 0)], 0
    for i, c in enumerate(w.prefix(n), 1):
        s += 1 if c == "S" else -1
        out.append((i, s))
    return out


def _walk(w: SPWord, n: int) -> list[int]:
    return [s for _, s in sum_graph(w, n)]


@dataclass(frozen=True)
class Quad:
    """a2 k^2 + a1 k + a0 over the rationals."""
    a2: Fraction
    a1: Fraction
    a0: Fraction

    def __call__(self, k) -> Fraction:
        return self.a2 * k * k + self.a1 * k + self.a0

    @property
    def sign_at_infinity(self) -> int:
        for a in (self.a2, self.a1, self.a0):
            if a:
                return 1 if a > 0 else -1
        return 0

    @property
    def diverges(self) -> int:
        """+1 / -1 if the polynomial tends to +inf / -inf, else 0."""
        lead = self.a2 or self.a1
        return 0 if not lead else (1 if lead > 0 else -1)

    def sup(self) -> Fraction:
        """Supremum over integers k >= 0 of a polynomial bounded above."""
        if self.a2 == 0:
            return self.a0
        v = -self.a1 / (2 * self.a2)
        ks = {0} | {k for k in (math.floor(v), math.ceil(v)) if k >= 0}
        return max(self(k) for k in ks)

    def neg(self) -> Quad:
        return Quad(-self.a2, -self.a1, -self.a0)

    def last_root(self) -> float:
        """Largest real root (-inf if none / constant)."""
        a, b, c = map(float, (self.a2, self.a1, self.a0))
        if a == 0:
            return -c / b if b else -INF
        disc = b * b - 4 * a * c
        if disc < 0:
            return -INF
        r = math.sqrt(disc)
        return max((-b + r) / (2 * a), (-b - r) / (2 * a))


@dataclass
class Structure:
    head: list[int]  # walk values at 0..n0
    quads: list[Quad]  # walk value at checkpoint i of cycle k
    start: Callable[[int], int]  # index where cycle k begins


def structure(w: SPWord) -> Structure | None:
    """Exact eventual shape of the walk, or None for words we cannot analyze."""
    cps = [w.checkpoints(k) for k in range(5)]
    if cps[0] is None:
        return None
    n_max = cps[4][-1]
    walk = _walk(w, n_max)
    vals = [[walk[n] for n in cp] for cp in cps]
    quads = []
    for i in range(len(cps[0])):
        f0, f1, f2 = (Fraction(vals[k][i]) for k in range(3))
        a2 = (f2 - 2 * f1 + f0) / 2
        q = Quad(a2, f1 - f0 - a2, f0)
        if any(q(k) != vals[k][i] for k in (3, 4)):
            raise ValueError(f"{w}: checkpoint values are not quadratic")
        quads.append(q)
    return Structure(walk[: cps[0][0] + 1], quads, lambda k: w.checkpoints(k)[0])


@dataclass
class Heights:
    upper: float
    lower: float
    exact: bool = True

    def __iter__(self):
        return iter((self.upper, self.lower))


def heights(w: SPWord, evidence: int = 4096) -> Heights:
    """sup / inf of sum(w, n) over n >= 0; estimates over a prefix when not analyzable."""
    st = structure(w)
    if st is None:
        walk = _walk(w, evidence)
        return Heights(max(walk), min(walk), False)
    if any(q.diverges > 0 for q in st.quads):
        up = INF
    else:
        up = int(max([max(st.head)] + [q.sup() for q in st.quads]))
    if any(q.diverges < 0 for q in st.quads):
        lo = -INF
    else:
        lo = int(min([min(st.head)] + [-q.neg().sup() for q in st.quads]))
    return Heights(up, lo, True)


@dataclass
class SPClassification:
    word: str
    upper_height: float
    lower_height: float
    in_A: bool | None
    in_B: bool | None
    root_active: bool | None
    sn_inf: bool | None
    evidence: int = 0
    exact: bool = True

    def __str__(self):
        def show(x):
            return "unknown" if x is None else ("yes" if x else "no")

        def h(x):
            return "+∞" if x == INF else ("−∞" if x == -INF else str(x))
        est = "" if self.exact else f" (estimate over {self.evidence} letters)"
        return (f"{self.word}: upper={h(self.upper_height)} lower={h(self.lower_height)} "
                f"A={show(self.in_A)} B={show(self.in_B)} root_active={show(self.root_active)} "
                f"SN∞={show(self.sn_inf)}{est}")


def _root_active(st: Structure) -> bool:
    signs = [q.sign_at_infinity for q in st.quads]
    return min(signs) <= 0 <= max(signs)


def _sn(st: Structure) -> bool:
    d = {q.diverges for q in st.quads}
    return d in ({1}, {-1})


def classify(w: SPWord, evidence: int = 4096) -> SPClassification:
    st = structure(w)
    h = heights(w, evidence)
    if st is None:
        return SPClassification(str(w), h.upper, h.lower, None, None, None, None, evidence, False)
    ra, sn = _root_active(st), _sn(st)
    assert not (ra and sn)
    return SPClassification(str(w), h.upper, h.lower, h.upper == INF, h.lower == -INF, ra, sn)


def _zero_free_from(w: SPWord, st: Structure) -> int:
    """An index after which the walk never returns to 0 (for words that are not root-active)."""
    roots = [r for r in (q.last_root() for q in st.quads) if r != -INF]
    k0 = max([0] + [math.floor(r) + 1 for r in roots])
    return st.start(k0)


def zero_word_factorization(w: SPWord, k: int, budget: int = 1 << 16) -> list[str]:
    """First k factors of w cut at every return of the walk to 0."""
    if k < 1:
        raise ValueError("k must be positive")
    st = structure(w)
    if st is not None and not _root_active(st):
        limit = _zero_free_from(w, st)
        exhaustive = True
    else:
        limit, exhaustive = budget, False
    factors, start, s = [], 0, 0
    text = w.prefix(limit)
    for i, c in enumerate(text, 1):
        s += 1 if c == "S" else -1
        if s == 0:
            factors.append(text[start:i])
            start = i
            if len(factors) == k:
                return factors
    why = f"no return to 0 after index {start}" if exhaustive else f"fewer than {k} zero words in {limit} letters"
    raise NoZeroFactorization(f"{w}: {why}", factors, limit)


# -- reduction witnesses ----------------------------------------------------------


@dataclass
class SPWitness:
    word: str
    target: str
    depth: int
    start: str  # the examined prefix, followed by an unknown tail
    steps: list[int] = field(default_factory=list)  # letter index of each cancelled pair
    end: str = ""

    @property
    def rule_name(self) -> str:
        return "PS" if self.target == "S" else "SP"

    def sequence(self, trs: TRS | None = None) -> FiniteSequence:
        """The witness as term rewriting steps on ``start`` over CUT, replayed and checked."""
        trs = trs or sp_trs()
        rule = trs.rule(self.rule_name)
        seq = FiniteSequence(word_term(self.start), [Redex((1,) * i, rule) for i in self.steps])
        if seq.target != word_term(self.end):
            raise AssertionError("term replay disagrees with the word-level witness")
        return seq

    def __str__(self):
        return (f"{self.word} ->* {self.target}^{self.depth}...: {len(self.steps)} {self.rule_name} steps "
                f"on a prefix of length {len(self.start)}; result {self.end[:self.depth + 8]}…")


def _min_prefix(w: SPWord, target: str, d: int, budget: int) -> int:
    """Least m such that cancelling all anti-target pairs in w[:m] leaves target^d in front."""
    other = "P" if target == "S" else "S"
    kept = pending = 0  # normal form is target^kept other^pending
    m = 0
    chunk = 256
    while m < budget:
        text = w.prefix(min(m + chunk, budget))
        for c in text[m:]:
            m += 1
            if c == other:
                pending += 1
            elif pending:
                pending -= 1
            else:
                kept += 1
            if kept >= d:
                return m
        chunk *= 2
    raise BudgetExhausted(f"{w}: no {target}^{d} within {budget} letters")


def reduce_toward(w: SPWord, target: str, d: int, budget: int = 1 << 16) -> SPWitness:
    """Greedy leftmost cancellation of PS (target S) or SP (target P) pairs."""
    if target not in LETTERS:
        raise ValueError("target must be S or P")
    h = heights(w)
    if h.exact:
        reach = h.upper if target == "S" else -h.lower
        if reach < d:
            raise InsufficientHeight(f"{w}: {'upper' if target == 'S' else 'lower'} height "
                                     f"{h.upper if target == 'S' else h.lower} < {d}")
    m = _min_prefix(w, target, d, budget)
    start = w.prefix(m)
    pair = ("P" + "S") if target == "S" else ("S" + "P")
    cur, steps = start, []
    while True:
        i = cur.find(pair)
        if i < 0:
            break
        nxt = cur[:i] + cur[i + 2:]
        assert cur[i:i + 2] == pair and len(nxt) == len(cur) - 2
        steps.append(i)
        cur = nxt
    if not cur.startswith(target * d):
        raise AssertionError(f"greedy cancellation ended in {cur[:d]}")
    return SPWitness(str(w), target, d, start, steps, cur)
