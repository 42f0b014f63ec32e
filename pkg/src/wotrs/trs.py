"""Rules, rewrite systems, critical pairs and (weak) orthogonality."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import NotLeftLinear, ParseError
from .terms import (Signature, Term, fmt_pos, normalize_vars, parse_term,
                    rename, replace_at, substitute)


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if not self.lhs.is_finite:
            raise ValueError(f"rule {self.name}: left-hand side must be finite")
        if self.lhs.is_var:
            raise ValueError(f"rule {self.name}: left-hand side is a variable")
        extra = self.rhs.variables() - self.lhs.variables()
        if extra:
            raise ValueError(f"rule {self.name}: rhs variables {sorted(extra)} not in lhs")

    @cached_property
    def var_positions(self) -> dict[str, list[tuple]]:
        out: dict[str, list[tuple]] = {}
        for p, n in self.lhs.positions():
            sym, kids = self.lhs.nodes[n]
            if kids is None:
                out.setdefault(sym, []).append(p)
        return out

    @cached_property
    def pattern_positions(self) -> frozenset:
        return frozenset(p for p, n in self.lhs.positions() if self.lhs.nodes[n][1] is not None)

    @cached_property
    def pattern_depth(self) -> int:
        """Height of the lhs, variables included: the most a step can lift a subterm."""
        return self.lhs.height()

    @property
    def left_linear(self) -> bool:
        return all(len(ps) == 1 for ps in self.var_positions.values())

    @property
    def collapsing(self) -> bool:
        return self.rhs.is_var

    def rhs_occurrences(self, x: str, depth: int = 64) -> list[tuple]:
        """Positions of variable ``x`` in the rhs (cut at ``depth`` if rhs is infinite)."""
        bound = None if self.rhs.is_finite else depth
        return [p for p, n in self.rhs.positions(bound)
                if self.rhs.nodes[n][1] is None and self.rhs.nodes[n][0] == x]

    def __str__(self):
        return f"{self.name} : {self.lhs} -> {self.rhs}"

    def __repr__(self):
        return f"Rule({str(self)!r})"


@dataclass(frozen=True)
class TRS:
    signature: Signature
    rules: tuple

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError("duplicate rule names")
        for r in self.rules:
            self.signature.check(r.lhs)
            self.signature.check(r.rhs)

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(f"no rule named {name}")

    @property
    def max_pattern_depth(self) -> int:
        return max((r.pattern_depth for r in self.rules), default=0)

    @property
    def collapse_free(self) -> bool:
        return not any(r.collapsing for r in self.rules)

    def extend(self, signature: Signature | None = None, rules=()) -> TRS:
        sig = self.signature.merge(signature) if signature else self.signature
        return TRS(sig, self.rules + tuple(rules))

    def __str__(self):
        lines = [f"sig  {self.signature}"]
        lines += [f"rule {r}" for r in self.rules]
        return "\n".join(lines)


def make_trs(rules: dict[str, str] | list[tuple[str, str, str]], signature: Signature | dict | None = None) -> TRS:
    """Build a TRS from ``{name: "lhs -> rhs"}``.

    Arities are inferred from the rules; ``signature`` adds (or pins) further symbols.
    """
    items = rules.items() if isinstance(rules, dict) else [(n, f"{l} -> {r}") for n, l, r in rules]
    sig = Signature(signature) if isinstance(signature, dict) else (signature or Signature({}))
    parsed = []
    for name, text in items:
        lhs_text, rhs_text = text.split("->")
        parsed.append((name, parse_term(lhs_text), parse_term(rhs_text)))
    for _, l, r in parsed:
        sig = sig.merge(Signature(l.symbols())).merge(Signature(r.symbols()))
    return TRS(sig, [Rule(n, l, r) for n, l, r in parsed])


_SIG_ITEM = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)/(\d+)$")


def parse_trs(text: str) -> TRS:
    """Parse the line-oriented ``.trs`` format (``sig`` and ``rule`` lines)."""
    symbols: dict[str, int] = {}
    rules = []
    pending = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        head, _, rest = stripped.partition(" ")
        if head == "sig":
            col = indent + 4
            for item in rest.split():
                m = _SIG_ITEM.match(item)
                if not m:
                    raise ParseError(f"bad signature item {item!r}", ln, line.find(item) + 1)
                if symbols.setdefault(m.group(1), int(m.group(2))) != int(m.group(2)):
                    raise ParseError(f"arity clash for {m.group(1)}", ln, col)
        elif head == "rule":
            name, sep, body = rest.partition(":")
            if not sep or "->" not in body:
                raise ParseError("expected 'rule <name> : <lhs> -> <rhs>'", ln, indent + 1)
            lhs_text, _, rhs_text = body.partition("->")
            body_col = line.index(":") + 2
            pending.append((name.strip(), lhs_text, rhs_text, ln, body_col, body_col + len(lhs_text) + 2))
        else:
            raise ParseError(f"unknown directive {head!r}", ln, indent + 1)
    sig = Signature(symbols)
    for name, lhs_text, rhs_text, ln, lcol, rcol in pending:
        lhs = parse_term(lhs_text, sig, ln, lcol)
        rhs = parse_term(rhs_text, sig, ln, rcol)
        try:
            rules.append(Rule(name, lhs, rhs))
        except ValueError as e:
            raise ParseError(str(e), ln, 1) from None
    return TRS(sig, rules)


def load_trs(path) -> TRS:
    with open(path, encoding="utf-8") as fh:
        return parse_trs(fh.read())


# -- syntactic checks ------------------------------------------------------------


@dataclass(frozen=True)
class RuleCheck:
    left_linear: bool
    collapsing_rules: frozenset


def check_rules(trs: TRS) -> RuleCheck:
    return RuleCheck(all(r.left_linear for r in trs.rules),
                     frozenset(r.name for r in trs.rules if r.collapsing))


# -- unification over finite trees -------------------------------------------------
# A tree is a variable name (str) or a tuple (symbol, *children).


def to_tree(t: Term, n=None):
    n = t.root if n is None else n
    sym, kids = t.nodes[n]
    if kids is None:
        return sym
    return (sym, *(to_tree(t, k) for k in kids))


def from_tree(tree) -> Term:
    from .terms import Builder
    b = Builder()

    def go(x):
        if isinstance(x, str):
            return b.add(x, None)
        return b.add(x[0], [go(c) for c in x[1:]])

    return b.term(go(tree))


def _walk(x, theta):
    while isinstance(x, str) and x in theta:
        x = theta[x]
    return x


def _occurs(v, x, theta):
    x = _walk(x, theta)
    if isinstance(x, str):
        return x == v
    return any(_occurs(v, c, theta) for c in x[1:])


def unify(s, t, theta=None):
    """Most general unifier of two trees, or None."""
    theta = dict(theta or {})
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, theta), _walk(b, theta)
        if a == b:
            continue
        if isinstance(a, str):
            if _occurs(a, b, theta):
                return None
            theta[a] = b
        elif isinstance(b, str):
            if _occurs(b, a, theta):
                return None
            theta[b] = a
        else:
            if a[0] != b[0] or len(a) != len(b):
                return None
            stack.extend(zip(a[1:], b[1:]))
    return theta


def _resolve(x, theta):
    x = _walk(x, theta)
    if isinstance(x, str):
        return x
    return (x[0], *(_resolve(c, theta) for c in x[1:]))


def _subtree(tree, p):
    for i in p:
        tree = tree[i]
    return tree


# -- critical pairs ----------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPair:
    peak: Term
    left_reduct: Term
    right_reduct: Term
    outer_rule: str
    inner_rule: str
    position: tuple

    @property
    def trivial(self) -> bool:
        return self.left_reduct == self.right_reduct

    def __str__(self):
        return (f"<{self.left_reduct}, {self.right_reduct}> from {self.peak} "
                f"({self.outer_rule} at ε / {self.inner_rule} at {fmt_pos(self.position)})")


def critical_pairs(trs: TRS) -> list[CriticalPair]:
    """All critical pairs, ordered by (outer rule, inner rule, position).

    Root overlaps of two distinct rules are symmetric and reported once, with the
    earlier rule as the outer one.
    """
    if not check_rules(trs).left_linear:
        raise NotLeftLinear("critical pair computation requires a left-linear TRS")
    out = []
    for i, outer in enumerate(trs.rules):
        ren1 = {x: f"{x}#1" for x in outer.lhs.variables()}
        l1 = to_tree(rename(outer.lhs, ren1))
        r1 = rename(outer.rhs, ren1)
        for j, inner in enumerate(trs.rules):
            ren2 = {x: f"{x}#2" for x in inner.lhs.variables()}
            l2 = to_tree(rename(inner.lhs, ren2))
            r2 = rename(inner.rhs, ren2)
            for p in sorted(outer.pattern_positions):
                if p == () and j <= i:
                    continue
                theta = unify(_subtree(l1, p), l2)
                if theta is None:
                    continue
                sigma = {v: from_tree(_resolve(v, theta)) for v in
                         set(ren1.values()) | set(ren2.values())}
                peak = from_tree(_resolve(l1, theta))
                left = substitute(r1, sigma)
                right = replace_at(peak, p, substitute(r2, sigma))
                peak, left, right = normalize_vars(peak, left, right)
                out.append(CriticalPair(peak, left, right, outer.name, inner.name, p))
    return out


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: CriticalPair | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


@lru_cache(maxsize=256)
def is_weakly_orthogonal(trs: TRS) -> Verdict:
    if not check_rules(trs).left_linear:
        return Verdict(False, None, "not left-linear")
    for cp in critical_pairs(trs):
        if not cp.trivial:
            return Verdict(False, cp, "non-trivial critical pair")
    return Verdict(True)


def is_orthogonal(trs: TRS) -> bool:
    return check_rules(trs).left_linear and not critical_pairs(trs)
