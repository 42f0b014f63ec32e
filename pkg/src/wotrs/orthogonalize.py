"""Removing overlaps between co-initial parallel steps and developments."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExhausted, InvariantViolation, NotWeaklyOrthogonal
from .redex import (Development, ParallelStep, Redex, RedexSet, _overlap_pairs,
                    as_redex_set, conflict, overlap, y_redexes)
from .terms import disjoint, fmt_pos
from .trs import TRS, is_weakly_orthogonal

INF = float("inf")


def require_wo(trs: TRS):
    v = is_weakly_orthogonal(trs)
    if not v:
        detail = f": {v.witness}" if v.witness else f" ({v.reason})"
        raise NotWeaklyOrthogonal(f"TRS is not weakly orthogonal{detail}")


def cross_conflicts(A, B) -> list[tuple[Redex, Redex]]:
    """Pairs (a, b), a in A and b in B, non-identical with overlapping patterns."""
    A, B = set(A), set(B)
    items = sorted(A | B)
    out = []
    for i, j in _overlap_pairs(items):
        x, y = items[i], items[j]
        if x in A and y in B:
            out.append((x, y))
        if y in A and x in B:
            out.append((y, x))
    return sorted(set(out), key=lambda p: (p[0].sort_key(), p[1].sort_key()))


def conflict_frontier(A, B) -> float:
    """Least depth of a redex involved in a cross conflict."""
    return min((min(a.depth, b.depth) for a, b in cross_conflicts(A, B)), default=INF)


# -- parallel steps --------------------------------------------------------------


def orthogonalize_parallel(trs: TRS, alpha: ParallelStep, beta: ParallelStep) -> tuple[ParallelStep, ParallelStep]:
    """Repeatedly replace the outermost conflicting redex by an inner one it overlaps."""
    require_wo(trs)
    if alpha.source != beta.source:
        raise ValueError("steps are not co-initial")
    A, B = set(alpha.redexes.materialize(alpha.source)), set(beta.redexes.materialize(beta.source))
    while True:
        pairs = cross_conflicts(A, B)
        if not pairs:
            break
        cands = [(a.sort_key(), 0, a) for a, _ in pairs] + [(b.sort_key(), 1, b) for _, b in pairs]
        _, side, o = min(cands, key=lambda c: (c[0], c[1]))
        own, other = (A, B) if side == 0 else (B, A)
        same = [x for x in other if x.position == o.position and x != o]
        if same:
            # same position, different rules: beta's redex gives way to alpha's
            a = o if side == 0 else same[0]
            b = same[0] if side == 0 else o
            B.discard(b)
            B.add(a)
            continue
        inner = min((x for x in other if conflict(o, x)), key=Redex.sort_key)
        own.discard(o)
        own.add(inner)
    return ParallelStep(alpha.source, RedexSet(frozenset(A))), ParallelStep(beta.source, RedexSet(frozenset(B)))


# -- developments ----------------------------------------------------------------


def drop_y_redexes(dev: Development, context) -> Development:
    """Remove members of ``dev`` that are Y-redexes within ``context``."""
    ctx = set(as_redex_set(context).materialize(dev.source)) | set(dev.redexes.materialize(dev.source))
    ys = y_redexes(ctx).redexes
    keep = frozenset(r for r in dev.redexes.explicit if r not in ys)
    return Development(dev.source, RedexSet(keep))


@dataclass(frozen=True)
class TraceEntry:
    case: str
    u: Redex
    v: Redex
    w: Redex | None = None
    m: Redex | None = None
    side: str = "U"

    @property
    def depth(self) -> int:
        return self.u.depth

    def __str__(self):
        extra = "".join(f" {k}={x}" for k, x in (("w", self.w), ("m", self.m)) if x is not None)
        return f"case ({self.case}) at depth {self.depth}: u={self.u} [{self.side}] v={self.v}{extra}"


@dataclass
class OrthoResult:
    U: Development
    V: Development
    trace: list = field(default_factory=list)
    frontier: float = INF
    budget: int = 0
    exhausted: bool = False

    @property
    def orthogonal(self) -> bool:
        return self.frontier == INF


def orthogonalize_developments(trs: TRS, U: Development, V: Development, d: int | None = None,
                               strict: bool = False, max_iter: int = 100_000) -> OrthoResult:
    """Top-down orthogonalization: resolve the topmost conflict until none is above ``d``.

    Periodic sets are materialized to depth d + 3p (p the largest pattern depth),
    edited there, and keep their periodic tail below that window.
    """
    require_wo(trs)
    t = U.source
    if V.source != t:
        raise ValueError("developments are not co-initial")
    periodic = not (U.redexes.is_finite and V.redexes.is_finite)
    if periodic and d is None:
        raise BudgetExhausted("periodic developments need a depth budget")
    p = max(trs.max_pattern_depth, 1)
    window = None if not periodic else d + 3 * p
    A = set(U.redexes.materialize(t, window))
    B = set(V.redexes.materialize(t, window))
    limit = INF if d is None else d
    trace: list[TraceEntry] = []
    last = -1
    for _ in range(max_iter):
        pairs = cross_conflicts(A, B)
        if not pairs:
            break
        cands = [(a.sort_key(), 0, a) for a, _ in pairs] + [(b.sort_key(), 1, b) for _, b in pairs]
        _, side, u = min(cands, key=lambda c: (c[0], c[1]))
        if u.depth >= limit:
            break
        if u.depth < last:
            raise InvariantViolation(f"conflict frontier moved up: {u.depth} after {last}")
        last = u.depth
        own, other = (A, B) if side == 0 else (B, A)
        tag = "UV"[side]
        over = sorted(x for x in other if conflict(u, x))
        v = over[0]
        if len(over) == 1:
            other.discard(v)
            other.add(u)
            trace.append(TraceEntry("i", u, v, side=tag))
            continue
        w = over[1]
        if disjoint(v.position, w.position):
            own.discard(u)
            other.discard(v)
            other.discard(w)
            trace.append(TraceEntry("ii", u, v, w, side=tag))
            continue
        ms = sorted(x for x in own if x != u and overlap(x, v))
        if not ms:
            own.discard(u)
            own.add(v)
            trace.append(TraceEntry("iii", u, v, w, side=tag))
            continue
        m = ms[0]
        if not disjoint(w.position, m.position):
            raise InvariantViolation(f"case (iv) with w={w} and m={m} not disjoint")
        own.discard(u)
        own.discard(m)
        other.discard(v)
        other.discard(w)
        trace.append(TraceEntry("iv", u, v, w, m, side=tag))
    else:
        raise BudgetExhausted("orthogonalization did not terminate")
    frontier = conflict_frontier(A, B)
    if frontier < limit:
        raise InvariantViolation(f"conflict left at depth {frontier} < {limit}")
    if trace and frontier < last:
        raise InvariantViolation("conflict frontier moved up")
    exhausted = frontier != INF or (periodic and _tail_conflicts(trs, t, U, V, window))
    if exhausted and periodic and frontier == INF:
        frontier = window
    res = OrthoResult(_rebuild(t, U, A, window), _rebuild(t, V, B, window), trace, frontier,
                      window if periodic else (d or 0), exhausted)
    if strict and exhausted:
        raise BudgetExhausted(f"conflicts persist at depth {frontier} (budget {d})")
    return res


def _rebuild(t, dev: Development, items, window) -> Development:
    rs = dev.redexes
    if window is None or rs.is_finite:
        return Development(t, RedexSet(frozenset(items)))
    return Development(t, RedexSet(frozenset(items), rs.periodic, max(window, rs.periodic_from)))


def _tail_conflicts(trs, t, U, V, window) -> bool:
    """Do the untouched periodic tails still conflict below the window?"""
    p = max(trs.max_pattern_depth, 1)
    A = [r for r in U.redexes.materialize(t, window + 2 * p + len(t.reachable())) if r.depth >= window]
    B = [r for r in V.redexes.materialize(t, window + 2 * p + len(t.reachable())) if r.depth >= window]
    return bool(cross_conflicts(A, B))
