"""Finite, ω-long and segmented (ω·k+m) rewrite sequences."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .errors import ModulusUnavailable, ParseError
from .redex import Redex, RewriteStep, apply_step
from .terms import Term, eq_to_depth, parse_pos, parse_term, unfold
from .trs import TRS

INF = float("inf")


class FiniteSequence:
    """A list of single steps, replayed and validated on construction."""

    def __init__(self, source: Term, redexes=()):
        self.source = source
        self.redexes = tuple(redexes)
        self._terms = [source]
        for r in self.redexes:
            self._terms.append(apply_step(self._terms[-1], r))

    def __len__(self):
        return len(self.redexes)

    def term(self, i: int) -> Term:
        return self._terms[i]

    def step(self, i: int) -> RewriteStep:
        return RewriteStep(self._terms[i], self.redexes[i], self._terms[i + 1])

    def depth_of(self, i: int) -> int:
        return self.redexes[i].depth

    @property
    def target(self) -> Term:
        return self._terms[-1]

    def approx(self, d: int) -> Term:
        return unfold(self.target, d)

    def min_depth(self) -> float:
        return min((r.depth for r in self.redexes), default=INF)

    def count_at(self, d: int) -> int:
        return sum(r.depth == d for r in self.redexes)

    def prefix(self, n: int) -> list[RewriteStep]:
        return [self.step(i) for i in range(min(n, len(self)))]

    def __repr__(self):
        return f"FiniteSequence({self.source}, [{', '.join(map(str, self.redexes))}])"


class OmegaSequence:
    """An ω-long sequence given by ``redex_at(i)`` and a convergence modulus.

    ``modulus(d)`` is an index after which every step lies strictly below depth d.
    ``limit`` is the (rational) limit term when known.
    """

    def __init__(self, source: Term, redex_at: Callable[[int], Redex],
                 modulus: Callable[[int], int] | None = None, limit: Term | None = None,
                 name: str = "omega"):
        self.source = source
        self.redex_at = redex_at
        self.modulus = modulus
        self.limit = limit
        self.name = name
        self._terms = [source]

    def term(self, i: int) -> Term:
        while len(self._terms) <= i:
            k = len(self._terms) - 1
            self._terms.append(apply_step(self._terms[-1], self.redex_at(k)))
        return self._terms[i]

    def step(self, i: int) -> RewriteStep:
        return RewriteStep(self.term(i), self.redex_at(i), self.term(i + 1))

    def depth_of(self, i: int) -> int:
        return self.redex_at(i).depth

    def mod(self, d: int) -> int:
        if self.modulus is None:
            raise ModulusUnavailable(f"{self.name}: no convergence modulus")
        return max(0, self.modulus(d))

    def approx(self, d: int) -> Term:
        """The limit truncated at depth d."""
        return unfold(self.term(self.mod(d)), d)

    @property
    def target(self) -> Term:
        if self.limit is None:
            raise ModulusUnavailable(f"{self.name}: limit term not given")
        return self.limit

    def check_limit(self, d: int) -> bool:
        return eq_to_depth(self.term(self.mod(d)), self.target, d)

    def min_depth(self, cap: int = 256) -> float:
        for k in range(cap):
            depths = [self.depth_of(i) for i in range(self.mod(k))]
            if depths and min(depths) <= k:
                return min(depths)
        return INF

    def count_at(self, d: int) -> int:
        return sum(self.depth_of(i) == d for i in range(self.mod(d)))

    def tail(self, n: int) -> OmegaSequence:
        self.term(n)
        mod = None if self.modulus is None else (lambda d, m=self.modulus: max(0, m(d) - n))
        return OmegaSequence(self.term(n), lambda i: self.redex_at(n + i), mod, self.limit,
                             f"{self.name}[{n}:]")

    def prefix(self, n: int) -> list[RewriteStep]:
        return [self.step(i) for i in range(n)]

    def __repr__(self):
        return f"OmegaSequence({self.name}, from {self.source})"


def is_omega(seg) -> bool:
    return isinstance(seg, OmegaSequence)


@dataclass(frozen=True)
class OrderType:
    """ω·k + m."""
    k: int
    m: int

    def __str__(self):
        if self.k == 0:
            return str(self.m)
        head = "ω" if self.k == 1 else f"ω·{self.k}"
        return head + (f"+{self.m}" if self.m else "")


class SegmentedSequence:
    """Concatenation of finite and ω segments; each segment starts at the previous end."""

    def __init__(self, segments, check_depth: int = 8):
        self.segments = [s for s in segments if is_omega(s) or len(s)]
        if not self.segments:
            self.segments = list(segments[:1])
        for a, b in zip(self.segments, self.segments[1:]):
            end = a.target
            if is_omega(a) and not a.check_limit(check_depth):
                raise ValueError(f"{a.name}: limit does not match the modulus at depth {check_depth}")
            if end != b.source:
                raise ValueError(f"segment starts at {b.source}, previous ends at {end}")

    @property
    def source(self) -> Term:
        return self.segments[0].source

    @property
    def target(self) -> Term:
        return self.segments[-1].target

    def order_type(self) -> OrderType:
        k = m = 0
        for s in self.segments:
            if is_omega(s):
                k, m = k + 1, 0
            else:
                m += len(s)
        return OrderType(k, m)

    def min_depth(self) -> float:
        return min((s.min_depth() for s in self.segments), default=INF)

    def count_at(self, d: int) -> int:
        return sum(s.count_at(d) for s in self.segments)

    def __repr__(self):
        return f"SegmentedSequence({self.order_type()}, {self.segments})"


def as_segmented(seq) -> SegmentedSequence:
    if isinstance(seq, SegmentedSequence):
        return seq
    return SegmentedSequence([seq])


def as_single(seq):
    """A sequence of length <= ω as one Finite/Omega sequence (finite prefix folded in)."""
    seq = as_segmented(seq)
    segs = seq.segments
    if seq.order_type().k > 1 or (seq.order_type().k == 1 and not is_omega(segs[-1])):
        raise ValueError(f"sequence of order type {seq.order_type()} is longer than ω")
    if not is_omega(segs[-1]):
        return FiniteSequence(seq.source, [r for s in segs for r in s.redexes])
    head = [r for s in segs[:-1] for r in s.redexes]
    if not head:
        return segs[-1]
    om = segs[-1]
    n = len(head)
    mod = None if om.modulus is None else (lambda d, m=om.modulus: m(d) + n)
    return OmegaSequence(seq.source, lambda i: head[i] if i < n else om.redex_at(i - n), mod,
                         om.limit, om.name)


# -- generators -------------------------------------------------------------------


def spine(trs: TRS, source: Term, base=(), direction=(1,), rules=(), shift: int = 0,
          limit: Term | None = None, name: str = "spine") -> OmegaSequence:
    """Step i at ``base·direction^i`` using ``rules[i % len(rules)]``.

    The modulus is d -> d + shift, valid when step i lies at depth > i - shift.
    """
    rs = [trs.rule(r) if isinstance(r, str) else r for r in rules]
    base, direction = tuple(base), tuple(direction)

    def redex_at(i):
        return Redex(base + direction * i, rs[i % len(rs)])

    return OmegaSequence(source, redex_at, lambda d: d + shift, limit, name)


GENERATORS = {"spine": spine}

_KV = re.compile(r"(\w+)=((?:[^\s()]|\([^)]*\))+)")


def parse_sequence(text: str, trs: TRS, source: Term | None = None) -> SegmentedSequence:
    """Parse ``source:``, ``seq: step <pos>:<rule>; ...`` and ``omega: gen=... `` lines."""
    segments = []
    cur = source
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected '<kind>: ...'", ln, 1)
        head, body = head.strip(), body.strip()
        off = raw.index(":") + 2
        if head == "source":
            cur = parse_term(body, trs.signature, ln, off)
        elif head == "seq":
            if cur is None:
                raise ParseError("sequence before source", ln, 1)
            reds = []
            for item in filter(None, (s.strip() for s in body.split(";"))):
                if not item.startswith("step "):
                    raise ParseError(f"expected 'step <pos>:<rule>', got {item!r}", ln, off)
                pos, _, rule = item[5:].rpartition(":")
                try:
                    reds.append(Redex(parse_pos(pos.strip()), trs.rule(rule.strip())))
                except (KeyError, ValueError) as e:
                    raise ParseError(str(e), ln, off) from None
            seg = FiniteSequence(cur, reds)
            segments.append(seg)
            cur = seg.target
        elif head == "omega":
            if cur is None:
                raise ParseError("sequence before source", ln, 1)
            kv = dict(_KV.findall(body.split(" limit=")[0]))
            limit = None
            if " limit=" in " " + body:
                limit_text = body.split("limit=", 1)[1]
                limit = parse_term(limit_text, trs.signature, ln, off + body.index("limit=") + 6)
            gen = kv.get("gen", "spine")
            if gen not in GENERATORS:
                raise ParseError(f"unknown generator {gen!r}", ln, off)
            mod = kv.get("modulus", "shift(0)")
            m = re.fullmatch(r"shift\((-?\d+)\)", mod)
            if mod == "none":
                shift = None
            elif m:
                shift = int(m.group(1))
            else:
                raise ParseError(f"unknown modulus {mod!r}", ln, off)
            seg = spine(trs, cur, parse_pos(kv.get("base", "ε")), parse_pos(kv.get("dir", "1")),
                        kv.get("rules", "").split(","), shift or 0, limit)
            if shift is None:
                seg.modulus = None
            segments.append(seg)
            cur = limit
        else:
            raise ParseError(f"unknown line kind {head!r}", ln, 1)
    if not segments:
        if cur is None:
            raise ParseError("empty sequence file", 1, 1)
        segments = [FiniteSequence(cur, [])]
    return SegmentedSequence(segments)
