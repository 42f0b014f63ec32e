"""Redexes, steps, parallel steps and developments."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import BudgetExhausted, InvalidDevelopment, InvalidStep, NotARedex
from .terms import (Term, disjoint, eq_to_depth, fmt_pos, is_prefix, match_ids,
                    match_node, parse_pos, rewrite_at, unfold)
from .trs import TRS, Rule


@dataclass(frozen=True)
class Redex:
    position: tuple
    rule: Rule

    @property
    def depth(self) -> int:
        return len(self.position)

    @property
    def pattern_depth(self) -> int:
        return self.rule.pattern_depth

    @property
    def pattern_positions(self) -> frozenset:
        p = self.position
        return frozenset(p + q for q in self.rule.pattern_positions)

    def sort_key(self):
        return (len(self.position), self.position, self.rule.name)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return f"{fmt_pos(self.position)}:{self.rule.name}"

    def __repr__(self):
        return f"Redex({str(self)!r})"


def is_redex(t: Term, r: Redex) -> bool:
    return t.has_position(r.position) and match_ids(r.rule.lhs, t, t.node_at(r.position)) is not None


def find_redexes(trs: TRS, t: Term, d: int) -> list[Redex]:
    """All redexes rooted at depth < d, sorted by depth then position."""
    out = []
    cache: dict = {}
    for p, n in t.positions(d):
        if n not in cache:
            cache[n] = [r for r in trs.rules if match_node(r.lhs, t, n) is not None]
        out.extend(Redex(p, r) for r in cache[n])
    return sorted(out)


@dataclass(frozen=True)
class RewriteStep:
    source: Term
    redex: Redex
    target: Term


def apply_step(t: Term, r: Redex) -> Term:
    out = rewrite_at(t, r.position, r.rule.lhs, r.rule.rhs)
    if out is None:
        raise NotARedex(f"{r} is not a redex of {t}")
    return out


def step(t: Term, r: Redex) -> RewriteStep:
    return RewriteStep(t, r, apply_step(t, r))


# -- overlap ---------------------------------------------------------------------


def overlap(r1: Redex, r2: Redex, t: Term | None = None) -> bool:
    """Patterns share a position. Reflexive and symmetric."""
    p, q = r1.position, r2.position
    if len(p) > len(q):
        r1, r2, p, q = r2, r1, q, p
    return is_prefix(p, q) and q[len(p):] in r1.rule.pattern_positions


def conflict(r1: Redex, r2: Redex) -> bool:
    """Overlap between non-identical redexes."""
    return r1 != r2 and overlap(r1, r2)


def _overlap_pairs(redexes):
    """Overlapping index pairs, found by walking prefixes instead of all pairs."""
    by_pos: dict = {}
    for i, r in enumerate(redexes):
        by_pos.setdefault(r.position, []).append(i)
    pairs = []
    for i, r in enumerate(redexes):
        for q in r.rule.pattern_positions:
            for j in by_pos.get(r.position + q, ()):
                if j != i:
                    pairs.append((min(i, j), max(i, j)))
    return sorted(set(pairs))


def overlap_clusters(redexes, t: Term | None = None) -> list[list[Redex]]:
    """Partition into classes of the transitive closure of overlap."""
    rs = sorted(set(redexes))
    parent = list(range(len(rs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in _overlap_pairs(rs):
        a, b = find(i), find(j)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for i, r in enumerate(rs):
        groups.setdefault(find(i), []).append(r)
    return sorted(groups.values(), key=lambda g: g[0].sort_key())


def disjoint_pair(cluster) -> tuple[Redex, Redex] | None:
    for a, b in combinations(cluster, 2):
        if disjoint(a.position, b.position):
            return a, b
    return None


@dataclass(frozen=True)
class YReport:
    redexes: frozenset
    clusters: tuple  # (cluster, witness pair or None)

    def __contains__(self, r):
        return r in self.redexes


def y_redexes(redexes, t: Term | None = None) -> YReport:
    """Members of clusters that contain two redexes at disjoint positions."""
    found, verdicts = set(), []
    for c in overlap_clusters(redexes, t):
        w = disjoint_pair(c)
        verdicts.append((tuple(c), w))
        if w is not None:
            found.update(c)
    return YReport(frozenset(found), tuple(verdicts))


# -- redex sets ------------------------------------------------------------------


@dataclass(frozen=True)
class RedexSet:
    """Explicit redexes plus periodic markings ``(node id, rule)``.

    A marking denotes every tree occurrence (at depth >= ``periodic_from``)
    of that node of the source's equation system.
    """
    explicit: frozenset = frozenset()
    periodic: frozenset = frozenset()
    periodic_from: int = 0

    def __post_init__(self):
        object.__setattr__(self, "explicit", frozenset(self.explicit))
        object.__setattr__(self, "periodic", frozenset(self.periodic))

    @classmethod
    def of(cls, *redexes):
        return cls(frozenset(redexes))

    @property
    def is_finite(self) -> bool:
        return not self.periodic

    def materialize(self, t: Term, depth: int | None = None) -> list[Redex]:
        """Denoted redexes at depth < ``depth`` (all of them for finite sets)."""
        if depth is None:
            if self.periodic:
                raise BudgetExhausted("periodic redex set needs a depth")
            return sorted(self.explicit)
        out = {r for r in self.explicit if r.depth < depth}
        if self.periodic:
            marks: dict = {}
            for n, rule in self.periodic:
                marks.setdefault(n, []).append(rule)
            for p, n in t.positions(depth):
                if len(p) >= self.periodic_from and n in marks:
                    out.update(Redex(p, rule) for rule in marks[n])
        return sorted(out)

    def __len__(self):
        if self.periodic:
            raise TypeError("periodic redex set has no length")
        return len(self.explicit)

    def __iter__(self):
        return iter(self.materialize(None))

    def __bool__(self):
        return bool(self.explicit or self.periodic)

    def __str__(self):
        parts = [str(r) for r in sorted(self.explicit)]
        parts += [f"node {n} : {rule.name}" for n, rule in sorted(self.periodic, key=lambda x: (x[0], x[1].name))]
        tail = f" from depth {self.periodic_from}" if self.periodic and self.periodic_from else ""
        return "{" + ", ".join(parts) + "}" + tail


def as_redex_set(x) -> RedexSet:
    return x if isinstance(x, RedexSet) else RedexSet(frozenset(x))


def _check_periodic(t: Term, rs: RedexSet):
    for n, rule in rs.periodic:
        if match_node(rule.lhs, t, n) is None:
            raise NotARedex(f"node {n} is not a {rule.name}-redex")


def _check_depth(t: Term, rs: RedexSet) -> int | None:
    """Depth up to which a periodic set must be scanned to see every pattern of conflict."""
    if rs.is_finite:
        return None
    span = max(r.pattern_depth for _, r in rs.periodic)
    return rs.periodic_from + 2 * len(t.reachable()) + span + 1


@dataclass(frozen=True)
class ParallelStep:
    source: Term
    redexes: RedexSet = field(default_factory=RedexSet)

    def __post_init__(self):
        rs = as_redex_set(self.redexes)
        object.__setattr__(self, "redexes", rs)
        _check_periodic(self.source, rs)
        items = rs.materialize(self.source, _check_depth(self.source, rs))
        for r in rs.explicit:
            if not is_redex(self.source, r):
                raise NotARedex(f"{r} is not a redex of {self.source}")
        for a, b in combinations(items, 2):
            if not disjoint(a.position, b.position):
                raise InvalidStep(f"redexes {a} and {b} are not disjoint")

    @property
    def min_depth(self) -> float:
        items = self.redexes.materialize(self.source, _check_depth(self.source, self.redexes))
        return min((r.depth for r in items), default=float("inf"))

    def target(self, d: int | None = None) -> Term:
        return develop(self.source, self.redexes, d)

    def __len__(self):
        return len(self.redexes)

    def __str__(self):
        return str(self.redexes)


@dataclass(frozen=True)
class Development:
    source: Term
    redexes: RedexSet = field(default_factory=RedexSet)

    def __post_init__(self):
        rs = as_redex_set(self.redexes)
        object.__setattr__(self, "redexes", rs)
        _check_periodic(self.source, rs)
        for r in rs.explicit:
            if not is_redex(self.source, r):
                raise NotARedex(f"{r} is not a redex of {self.source}")
        items = rs.materialize(self.source, _check_depth(self.source, rs))
        for i, j in _overlap_pairs(items):
            raise InvalidDevelopment(f"redexes {items[i]} and {items[j]} overlap")

    def target(self, d: int | None = None) -> Term:
        return develop(self.source, self.redexes, d)

    def __str__(self):
        return str(self.redexes)


def _innermost(t: Term, redexes) -> Term:
    for r in sorted(redexes, key=lambda r: (-r.depth, r.position, r.rule.name)):
        t = apply_step(t, r)
    return t


def develop(t: Term, redexes, d: int | None = None, max_rounds: int = 4) -> Term:
    """Contract all redexes innermost-first (deepest, then leftmost).

    Finite explicit sets give the exact complete development. Periodic sets are
    developed on depth windows d+p, 2(d+p), ... until two windows agree to depth d.
    """
    if isinstance(redexes, (Development, ParallelStep)):
        redexes = redexes.redexes
    rs = as_redex_set(redexes)
    if rs.is_finite:
        items = sorted(rs.explicit)
        for i, j in _overlap_pairs(items):
            raise InvalidDevelopment(f"redexes {items[i]} and {items[j]} overlap")
        return _innermost(t, items)
    if d is None:
        raise BudgetExhausted("periodic development needs a depth budget")
    slack = max(r.pattern_depth for _, r in rs.periodic)
    window = d + slack + 1
    prev = None
    for _ in range(max_rounds):
        items = rs.materialize(t, window)
        cur = _innermost(t, items)
        # collapse towers pull material up from below the window
        local = eq_to_depth(cur, _innermost(unfold(t, window + slack), items), d)
        if local and prev is not None and eq_to_depth(prev, cur, d):
            return cur
        prev, window = (cur if local else None), 2 * window
    raise BudgetExhausted(f"development did not stabilize to depth {d} (infinite collapse?)")


def parse_redex_set(text: str, trs: TRS, binders: dict | None = None) -> RedexSet:
    """``{ε:SP, 1.1:SP}`` or ``{node X : AAA}`` (X a rec name from ``binders``)."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"redex set must be braced: {text!r}")
    explicit, periodic = set(), set()
    for item in filter(None, (s.strip() for s in body[1:-1].split(","))):
        lhs, sep, name = item.rpartition(":")
        if not sep:
            raise ValueError(f"bad redex literal {item!r}")
        rule = trs.rule(name.strip())
        lhs = lhs.strip()
        if lhs.startswith("node "):
            ref = lhs[5:].strip()
            if ref.isdigit():
                periodic.add((int(ref), rule))
            elif binders and ref in binders:
                periodic.add((binders[ref], rule))
            else:
                raise ValueError(f"unknown node {ref!r}")
        else:
            explicit.add(Redex(parse_pos(lhs), rule))
    return RedexSet(frozenset(explicit), frozenset(periodic))
