"""Compressing segmented sequences (order type ω·k+m) to length <= ω."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (BudgetExhausted, InvariantViolation, ModulusUnavailable,
                     NotLeftLinear, WitnessUnavailable)
from .redex import Redex, apply_step
from .sequences import FiniteSequence, OmegaSequence, OrderType, as_segmented, is_omega
from .terms import eq_to_depth, is_prefix
from .trs import TRS, check_rules

INF = float("inf")


class _Inserted(OmegaSequence):
    """``base`` with ``redex`` (a redex of base's limit) pulled forward to index n.

    The tail of ``base`` after n is replayed on every copy of the variables of the
    rule, interleaved by anti-diagonals over (copy stream, tail index).
    """

    def __init__(self, base: OmegaSequence, redex: Redex, n: int, scan_limit: int = 20_000):
        self.base = base
        self.inserted = redex
        self.n = n
        self.scan_limit = scan_limit
        rule = redex.rule
        self.dp = rule.pattern_depth
        self.streams = [None]  # stream 0: steps in the context
        self.var_streams: dict[str, list[int]] = {}
        for x in sorted(rule.var_positions):
            occ = rule.rhs_occurrences(x)
            if not rule.rhs.is_finite and len(rule.rhs_occurrences(x, 64 + len(rule.rhs.nodes))) != len(occ):
                raise ModulusUnavailable(f"rule {rule.name} copies {x} infinitely often")
            for op in occ:
                self.var_streams.setdefault(x, []).append(len(self.streams))
                self.streams.append(op)
        self._emitted: list[Redex] = []
        self._diag_ends: list[int] = []
        self._diag = 0
        mod = None if base.modulus is None else self._modulus
        limit = None if base.limit is None else apply_step(base.limit, redex)
        super().__init__(base.source, self._redex_at, mod, limit, f"{base.name}+{redex}")

    @property
    def M(self) -> int:
        return len(self.streams)

    def _place(self, i: int, k: int) -> Redex | None:
        """Tail step ``i`` of base (absolute index) as seen on stream k, if it lives there."""
        r = self.base.redex_at(i)
        q, P = self.inserted.position, r.position
        if not is_prefix(q, P):
            return r if k == 0 else None
        rel = P[len(q):]
        for x, vps in self.inserted.rule.var_positions.items():
            vp = vps[0]
            if is_prefix(vp, rel):
                if k not in self.var_streams.get(x, ()):
                    return None
                return Redex(q + self.streams[k] + rel[len(vp):], r.rule)
        raise InvariantViolation(f"tail step {r} touches the pattern of {self.inserted}")

    def _advance(self):
        D = self._diag
        for k in range(min(D, self.M - 1) + 1):
            r = self._place(self.n + D - k, k)
            if r is not None:
                self._emitted.append(r)
        self._diag_ends.append(len(self._emitted))
        self._diag += 1

    def _emission(self, j: int) -> Redex:
        scanned = 0
        while len(self._emitted) <= j:
            self._advance()
            scanned += 1
            if scanned > self.scan_limit:
                raise BudgetExhausted("interleaving produced no further steps")
        return self._emitted[j]

    def _redex_at(self, i: int) -> Redex:
        if i < self.n:
            return self.base.redex_at(i)
        if i == self.n:
            return self.inserted
        return self._emission(i - self.n - 1)

    def _through(self, D: int) -> int:
        if D < 0:
            return 0
        while len(self._diag_ends) <= D:
            self._advance()
        return self._diag_ends[D]

    def _modulus(self, d: int) -> int:
        N = max(self.base.mod(d + self.dp), self.n)
        return self.n + 1 + self._through(self.M - 1 + N - self.n - 1)


def insert_after_limit(seq: OmegaSequence, redex: Redex, min_index: int = 0) -> _Inserted:
    """Successor case: move a step after the limit of ``seq`` to a finite index."""
    n = max(seq.mod(redex.depth + redex.rule.pattern_depth), min_index)
    return _Inserted(seq, redex, n)


class _Rounds(OmegaSequence):
    """ω followed by ω: pull the second segment's steps forward one at a time."""

    def __init__(self, first: OmegaSequence, second: OmegaSequence, p: int):
        self.C = [first]
        self.ns: list[int] = []
        self.second = second
        self.p = p
        mod = None if (second.modulus is None or first.modulus is None) else self._modulus
        super().__init__(first.source, self._redex_at, mod, second.limit,
                         f"({first.name})·({second.name})")

    def _grow(self):
        j = len(self.ns)
        prev = self.C[j]
        r = self.second.redex_at(j)
        if prev.limit is None:
            prev.limit = self.second.term(j)
        n = max(prev.mod(r.depth + r.rule.pattern_depth), self.ns[-1] + 1 if self.ns else 0)
        self.ns.append(n)
        self.C.append(_Inserted(prev, r, n))

    def _redex_at(self, k: int) -> Redex:
        j = 0
        while True:
            while len(self.ns) <= j:
                self._grow()
            if self.ns[j] > k:
                return self.C[j].redex_at(k)
            j += 1

    def _modulus(self, d: int) -> int:
        j = self.second.mod(d + self.p)
        while len(self.C) <= j:
            self._grow()
        return self.C[j].mod(d)


def _concat_finite(head: FiniteSequence | None, seg):
    if head is None or len(head) == 0:
        return seg
    if not is_omega(seg):
        return FiniteSequence(head.source, head.redexes + seg.redexes)
    steps = head.redexes
    n = len(steps)
    mod = None if seg.modulus is None else (lambda d, m=seg.modulus: m(d) + n)
    return OmegaSequence(head.source, lambda i: steps[i] if i < n else seg.redex_at(i - n), mod,
                         seg.limit, seg.name)


def compress_sequence(trs: TRS, seq) -> FiniteSequence | OmegaSequence:
    """Compressed sequence from the same source to the same end."""
    if not check_rules(trs).left_linear:
        raise NotLeftLinear("compression needs a left-linear TRS")
    seq = as_segmented(seq)
    p = max(trs.max_pattern_depth, 1)
    cur = FiniteSequence(seq.source, [])
    for seg in seq.segments:
        if not is_omega(cur):
            cur = _concat_finite(cur, seg)
        elif not is_omega(seg):
            for r in seg.redexes:
                cur = insert_after_limit(cur, r)
        else:
            if cur.limit is None:
                cur.limit = seg.source
            cur = _Rounds(cur, seg, p)
    return cur


@dataclass
class CompressionReport:
    input_length: OrderType
    output: object
    min_depth: float
    steps_at_d_in: int
    steps_at_d_out: int
    limit_agreement_depth: int
    source_preserved: bool
    limit_agrees: bool
    min_depth_out: float = INF

    @property
    def output_length(self) -> str:
        return "ω" if is_omega(self.output) else str(len(self.output))

    @property
    def ok(self) -> bool:
        return (self.source_preserved and self.limit_agrees and self.min_depth_out == self.min_depth
                and self.steps_at_d_in == self.steps_at_d_out)


def compress(trs: TRS, seq, d_check: int = 20) -> CompressionReport:
    seq = as_segmented(seq)
    out = compress_sequence(trs, seq)
    d = seq.min_depth()
    n_in = seq.count_at(d) if d != INF else 0
    d_out = out.min_depth()
    n_out = out.count_at(d) if d != INF else 0
    end = out.term(out.mod(d_check)) if is_omega(out) else out.target
    agrees = eq_to_depth(end, seq.target, d_check)
    rep = CompressionReport(seq.order_type(), out, d, n_in, n_out, d_check,
                            out.source == seq.source, agrees, d_out)
    if not rep.ok:
        raise InvariantViolation(f"compression broke a guarantee: {rep}")
    return rep


# -- divergent sequences ------------------------------------------------------------


@dataclass
class DivergentReport:
    depth: int
    steps: list
    hits: int
    c: int

    @property
    def K(self) -> int:
        return len(self.steps)


def compress_divergent(trs: TRS, seq, K: int, witness=None) -> DivergentReport:
    """First K steps of a length <= ω sequence with infinitely many steps at the witnessed depth.

    ``witness(j)`` gives ``(segment, index)`` of the j-th step at that depth.
    """
    if witness is None:
        raise WitnessUnavailable("divergence witness required")
    seq = as_segmented(seq)
    seg0, i0 = witness(0)
    d = seq.segments[seg0].depth_of(i0)
    for j in range(8):
        s, i = witness(j)
        if seq.segments[s].depth_of(i) != d:
            raise WitnessUnavailable(f"witness step {j} is not at depth {d}")
    out = compress_sequence(trs, seq)
    steps = out.prefix(K)
    positions = [k for k, st in enumerate(steps) if st.redex.depth == d]
    gaps = [b - a for a, b in zip([-1] + positions, positions)]
    c = max(gaps + [K - positions[-1] - 1 if positions else K], default=K) or 1
    return DivergentReport(d, steps, len(positions), c)
