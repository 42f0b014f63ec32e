"""Finite and rational infinite terms.

A term is a finite equation system: a tuple of nodes plus a root id. A node is
``(symbol, kids)`` for a function symbol (``kids`` a tuple of node ids) or
``(name, None)`` for a variable. Cycles give rational infinite terms; since
variable nodes have no children every cycle runs through function nodes, so
every system is guarded.

Equality and hashing are by bisimilarity (equality of the tree unfoldings).
The raw graph is kept as built so that node ids stay meaningful for periodic
redex markings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import ParseError, PositionError

CUT = "▢"

Position = tuple  # tuple[int, ...], 1-based child indices
Node = tuple  # (symbol, kids | None)


def fmt_pos(p) -> str:
    return ".".join(map(str, p)) if p else "ε"


def parse_pos(text: str) -> tuple:
    text = text.strip()
    if text in ("ε", "e", "eps", ""):
        return ()
    try:
        return tuple(int(x) for x in text.split("."))
    except ValueError:
        raise ParseError(f"bad position {text!r}") from None


def is_prefix(p, q) -> bool:
    return len(p) <= len(q) and q[: len(p)] == p


def disjoint(p, q) -> bool:
    return not is_prefix(p, q) and not is_prefix(q, p)


class Term:
    __slots__ = ("nodes", "root", "_key", "_finite")

    def __init__(self, nodes, root=0):
        self.nodes = tuple(nodes)
        self.root = root
        self._key = None
        self._finite = None

    # -- structure -------------------------------------------------------

    def node(self, n=None) -> Node:
        return self.nodes[self.root if n is None else n]

    @property
    def symbol(self) -> str:
        return self.nodes[self.root][0]

    @property
    def is_var(self) -> bool:
        return self.nodes[self.root][1] is None

    @property
    def kids(self) -> tuple:
        return self.nodes[self.root][1] or ()

    def args(self) -> list[Term]:
        return [Term(self.nodes, k)._gc() for k in self.kids]

    def reachable(self) -> list[int]:
        seen, order, stack = set(), [], [self.root]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            order.append(n)
            stack.extend(reversed(self.nodes[n][1] or ()))
        return order

    def _gc(self) -> Term:
        order = self.reachable()
        if len(order) == len(self.nodes) and self.root == 0 and order == sorted(order):
            return self
        ren = {n: i for i, n in enumerate(order)}
        nodes = []
        for n in order:
            sym, kids = self.nodes[n]
            nodes.append((sym, None if kids is None else tuple(ren[k] for k in kids)))
        return Term(nodes, 0)

    @property
    def is_finite(self) -> bool:
        if self._finite is None:
            self._finite = _acyclic(self.nodes, self.root)
        return self._finite

    def height(self) -> int:
        """Length of the longest position; infinite terms raise."""
        if not self.is_finite:
            raise ValueError("infinite term has no height")
        memo = {}
        for n in _postorder(self.nodes, self.root):
            kids = self.nodes[n][1] or ()
            memo[n] = 1 + max((memo[k] for k in kids), default=-1)
        return memo[self.root]

    def variables(self) -> set[str]:
        return {self.nodes[n][0] for n in self.reachable() if self.nodes[n][1] is None}

    def symbols(self) -> dict[str, int]:
        out = {}
        for n in self.reachable():
            sym, kids = self.nodes[n]
            if kids is not None:
                out[sym] = len(kids)
        return out

    def node_at(self, p) -> int:
        n = self.root
        for i in p:
            kids = self.nodes[n][1]
            if not kids or not 1 <= i <= len(kids):
                raise PositionError(f"position {fmt_pos(p)} not in {self}")
            n = kids[i - 1]
        return n

    def has_position(self, p) -> bool:
        try:
            self.node_at(p)
        except PositionError:
            return False
        return True

    def subterm(self, p) -> Term:
        return Term(self.nodes, self.node_at(p))._gc()

    def positions(self, depth=None) -> Iterator[tuple]:
        """Yield ``(position, node id)`` in breadth-first order, depth < ``depth``."""
        if depth is None and not self.is_finite:
            raise ValueError("infinite term needs a depth bound")
        level = [((), self.root)]
        d = 0
        while level and (depth is None or d < depth):
            nxt = []
            for p, n in level:
                yield p, n
                for i, k in enumerate(self.nodes[n][1] or (), 1):
                    nxt.append((p + (i,), k))
            level = nxt
            d += 1

    # -- equality --------------------------------------------------------

    @property
    def key(self) -> tuple:
        """Canonical minimal equation system; equal iff bisimilar."""
        if self._key is None:
            self._key = _canonical(self.nodes, self.root)
        return self._key

    def canonical(self) -> Term:
        t = Term(self.key, 0)
        t._key = self.key
        return t

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return format_term(self)

    def __repr__(self):
        return f"Term({format_term(self)!r})"


def _postorder(nodes, root) -> list[int]:
    out, seen, stack = [], set(), [(root, False)]
    while stack:
        n, done = stack.pop()
        if done:
            out.append(n)
            continue
        if n in seen:
            continue
        seen.add(n)
        stack.append((n, True))
        for k in nodes[n][1] or ():
            if k not in seen:
                stack.append((k, False))
    return out


def _acyclic(nodes, root) -> bool:
    state = {}
    stack = [(root, iter(nodes[root][1] or ()))]
    state[root] = 1
    while stack:
        n, it = stack[-1]
        k = next(it, None)
        if k is None:
            state[n] = 2
            stack.pop()
            continue
        s = state.get(k)
        if s == 1:
            return False
        if s is None:
            state[k] = 1
            stack.append((k, iter(nodes[k][1] or ())))
    return True


def _classes(nodes, root) -> dict[int, int]:
    """Bisimulation classes of the nodes reachable from ``root``."""
    order = _postorder(nodes, root)
    if _acyclic(nodes, root):
        table, cls = {}, {}
        for n in order:
            sym, kids = nodes[n]
            sig = (sym, None if kids is None else tuple(cls[k] for k in kids))
            cls[n] = table.setdefault(sig, len(table))
        return cls
    table = {}
    cls = {}
    for n in order:
        sym, kids = nodes[n]
        cls[n] = table.setdefault((sym, None if kids is None else len(kids)), len(table))
    count = len(table)
    while True:
        table = {}
        new = {}
        for n in order:
            sym, kids = nodes[n]
            sig = (cls[n], None if kids is None else tuple(cls[k] for k in kids))
            new[n] = table.setdefault(sig, len(table))
        cls = new
        if len(table) == count:
            return cls
        count = len(table)


def _canonical(nodes, root) -> tuple:
    cls = _classes(nodes, root)
    rep = {}
    for n, c in cls.items():
        rep.setdefault(c, n)
    ren, out = {}, []
    stack = [cls[root]]
    while stack:
        c = stack.pop()
        if c in ren:
            continue
        ren[c] = len(out)
        out.append(None)
        kids = nodes[rep[c]][1]
        if kids:
            stack.extend(reversed([cls[k] for k in kids]))
    for c, i in ren.items():
        sym, kids = nodes[rep[c]]
        out[i] = (sym, None if kids is None else tuple(ren[cls[k]] for k in kids))
    return tuple(out)


# -- construction ------------------------------------------------------------


class Builder:
    """Mutable node list used to assemble new terms out of existing ones."""

    def __init__(self):
        self.nodes: list = []

    def add(self, sym, kids=()) -> int:
        self.nodes.append((sym, None if kids is None else tuple(kids)))
        return len(self.nodes) - 1

    def embed(self, t: Term) -> int:
        off = len(self.nodes)
        for sym, kids in t.nodes:
            self.nodes.append((sym, None if kids is None else tuple(k + off for k in kids)))
        return t.root + off

    def term(self, root: int) -> Term:
        return Term(self.nodes, root)._gc()


def var(name: str) -> Term:
    return Term([(name, None)])


def fn(sym: str, *args: Term) -> Term:
    b = Builder()
    roots = [b.embed(a) for a in args]
    return b.term(b.add(sym, roots))


def const(sym: str) -> Term:
    return Term([(sym, ())])


def rec(build) -> Term:
    """``rec(lambda X: fn('S', X))`` builds the rational term ``rec X = S(X)``."""
    hole = "\0hole"
    body = build(var(hole))
    nodes = list(body.nodes)
    hole_ids = {i for i, (s, k) in enumerate(nodes) if k is None and s == hole}
    if body.root in hole_ids:
        raise ValueError("unguarded recursion")
    fixed = []
    for sym, kids in nodes:
        if kids is not None:
            kids = tuple(body.root if k in hole_ids else k for k in kids)
        fixed.append((sym, kids))
    return Term(fixed, body.root)._gc()


# -- operations ----------------------------------------------------------------


def unfold(t: Term, d: int) -> Term:
    """Tree unfolding truncated at depth ``d``.

    Nodes at depth ``d`` that have arguments become CUT; leaves there are kept.
    """
    if d < 0:
        raise ValueError("depth must be non-negative")
    b = Builder()
    memo: dict = {}
    cut = None

    def go(n, r):
        nonlocal cut
        key = (n, r)
        if key in memo:
            return memo[key]
        sym, kids = t.nodes[n]
        if kids is None:
            out = b.add(sym, None)
        elif not kids:
            out = b.add(sym)
        elif r == 0:
            if cut is None:
                cut = b.add(CUT)
            out = cut
        else:
            out = b.add(sym, [go(k, r - 1) for k in kids])
        memo[key] = out
        return out

    # iterative deepening is unnecessary: recursion depth is bounded by d
    return b.term(go(t.root, d))


def _cut_label(sym, kids):
    return (CUT, ()) if kids else (sym, kids)


def eq_to_depth(t: Term, u: Term, d: int) -> bool:
    """True iff ``unfold(t, d) == unfold(u, d)``, decided without unfolding."""
    seen = set()
    stack = [(t.root, u.root, d)]
    while stack:
        a, b, r = stack.pop()
        if (a, b, r) in seen:
            continue
        seen.add((a, b, r))
        sa, ka = t.nodes[a]
        sb, kb = u.nodes[b]
        if r == 0:
            # what unfold would leave at the cut
            if _cut_label(sa, ka) != _cut_label(sb, kb):
                return False
            continue
        if sa != sb or (ka is None) != (kb is None):
            return False
        if ka is None:
            continue
        if len(ka) != len(kb):
            return False
        stack.extend((x, y, r - 1) for x, y in zip(ka, kb))
    return True


def eq_rational(t: Term, u: Term) -> bool:
    return t == u


def bisimilarity_depth_bound(t: Term, u: Term) -> int:
    """Depth at which eq_to_depth decides bisimilarity (product-graph bound)."""
    n = max(len(t.reachable()), len(u.reachable()))
    arity = max([len(k or ()) for _, k in t.nodes + u.nodes] + [1])
    return n * n * arity + 1


def match(pattern: Term, t: Term, p=()) -> dict[str, Term] | None:
    """Match a finite pattern against the subterm of ``t`` at ``p``.

    Returns the substitution or ``None``. Function symbols in the pattern never
    match a CUT node. Repeated pattern variables require bisimilar bindings.
    """
    return match_node(pattern, t, t.node_at(p))


def match_node(pattern: Term, t: Term, start: int) -> dict[str, Term] | None:
    """Like :func:`match`, addressing the subterm by node id of ``t``."""
    binding = match_ids(pattern, t, start)
    if binding is None:
        return None
    return {x: Term(t.nodes, n)._gc() for x, n in binding.items()}


def match_ids(pattern: Term, t: Term, start: int) -> dict[str, int] | None:
    """Matching substitution as variable -> node id of ``t``."""
    binding: dict[str, int] = {}
    stack = [(pattern.root, start)]
    while stack:
        pn, tn = stack.pop()
        psym, pkids = pattern.nodes[pn]
        if pkids is None:
            if psym in binding and binding[psym] != tn:
                if Term(t.nodes, binding[psym]) != Term(t.nodes, tn):
                    return None
            binding[psym] = tn
            continue
        tsym, tkids = t.nodes[tn]
        if tkids is None or tsym != psym or len(tkids) != len(pkids) or tsym == CUT:
            return None
        stack.extend(zip(pkids, tkids))
    return binding


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    if not sigma:
        return t
    b = Builder()
    roots = {x: b.embed(s) for x, s in sigma.items()}
    off = len(b.nodes)
    remap = {}
    for i, (sym, kids) in enumerate(t.nodes):
        if kids is None and sym in roots:
            remap[i] = roots[sym]
        else:
            remap[i] = off + i
    for sym, kids in t.nodes:
        b.nodes.append((sym, None if kids is None else tuple(remap[k] for k in kids)))
    return b.term(remap[t.root])


def node_path(t: Term, p) -> list[int]:
    """Node ids along position ``p``, root first."""
    path = [t.root]
    for i in p:
        kids = t.nodes[path[-1]][1]
        if not kids or not 1 <= i <= len(kids):
            raise PositionError(f"position {fmt_pos(p)} not in {t}")
        path.append(kids[i - 1])
    return path


def _splice(b: Builder, t: Term, path, p, child: int) -> int:
    for depth in range(len(p) - 1, -1, -1):
        sym, kids = t.nodes[path[depth]]
        kids = list(kids)
        kids[p[depth] - 1] = child
        child = b.add(sym, kids)
    return child


def replace_at(t: Term, p, u: Term) -> Term:
    """Replace the single tree occurrence at ``p`` (path is unshared first)."""
    path = node_path(t, p)
    b = Builder()
    b.embed(t)  # offsets 0: original ids stay valid
    return b.term(_splice(b, t, path, p, b.embed(u)))


def rewrite_at(t: Term, p, lhs: Term, rhs: Term) -> Term | None:
    """Contract ``lhs -> rhs`` at ``p`` in one pass (None if no match)."""
    path = node_path(t, p)
    binding = match_ids(lhs, t, path[-1])
    if binding is None:
        return None
    b = Builder()
    b.nodes = list(t.nodes)
    off = len(b.nodes)
    remap = {}
    for i, (sym, kids) in enumerate(rhs.nodes):
        remap[i] = binding[sym] if kids is None and sym in binding else off + i
    for sym, kids in rhs.nodes:
        b.nodes.append((sym, None if kids is None else tuple(remap[k] for k in kids)))
    return b.term(_splice(b, t, path, p, remap[rhs.root]))


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    return Term([(mapping.get(s, s), k) if k is None else (s, k) for s, k in t.nodes], t.root)


def normalize_vars(*terms: Term, prefix="x") -> tuple[Term, ...]:
    """Rename variables to x1, x2, ... by first occurrence (preorder, left to right)."""
    order: dict[str, str] = {}
    for t in terms:
        for _, n in _preorder_positions(t):
            sym, kids = t.nodes[n]
            if kids is None and sym not in order:
                order[sym] = f"{prefix}{len(order) + 1}"
    return tuple(rename(t, order) for t in terms)


def _preorder_positions(t: Term):
    seen = set()
    stack = [((), t.root)]
    while stack:
        p, n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        yield p, n
        kids = t.nodes[n][1] or ()
        for i in range(len(kids), 0, -1):
            stack.append((p + (i,), kids[i - 1]))


# -- signature ---------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    symbols: Mapping[str, int]

    def __post_init__(self):
        for s, a in self.symbols.items():
            if a < 0:
                raise ValueError(f"negative arity for {s}")
        object.__setattr__(self, "symbols", dict(self.symbols))

    def __hash__(self):
        return hash(tuple(sorted(self.symbols.items())))

    def __contains__(self, sym):
        return sym in self.symbols

    def arity(self, sym):
        return self.symbols[sym]

    def check(self, t: Term):
        for sym, ar in t.symbols().items():
            if sym == CUT:
                continue
            if sym not in self.symbols:
                raise ValueError(f"symbol {sym} not in signature")
            if self.symbols[sym] != ar:
                raise ValueError(f"symbol {sym} used with arity {ar}, declared {self.symbols[sym]}")

    def merge(self, other: Signature) -> Signature:
        out = dict(self.symbols)
        for s, a in other.symbols.items():
            if out.setdefault(s, a) != a:
                raise ValueError(f"arity clash for {s}")
        return Signature(out)

    def __str__(self):
        return " ".join(f"{s}/{a}" for s, a in self.symbols.items())


# -- syntax --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_']*|▢)|(?P<punct>[(),=])|(?P<bad>\S))")
_DEFAULT_VARS = re.compile(r"^[xyzuvw][0-9_']*$")


def _tokens(text: str):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group("bad"):
            line, col = _linecol(text, m.start("bad"))
            raise ParseError(f"unexpected character {m.group('bad')!r}", line, col)
        kind = "name" if m.group("name") else "punct"
        out.append((kind, m.group(kind), m.start(kind)))
    if text[pos:].strip():
        line, col = _linecol(text, pos)
        raise ParseError("trailing input", line, col)
    return out


def _linecol(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse_term(text: str, signature: Signature | None = None, line: int = 1, col: int = 1,
               binders: dict | None = None) -> Term:
    """Parse ``f(t1,...,tn)`` / constants / variables / ``rec X = e [in X]``.

    With a signature, declared names are symbols and other lowercase names are
    variables. Without one, names like x, y1, z' are variables and every other
    bare name is a constant. If ``binders`` is a dict it receives the node id
    of every ``rec`` name in the returned term.
    """
    toks = _tokens(text)
    nodes: list = []
    alias: dict[int, int] = {}
    named: dict[str, int] = {}
    i = 0

    def err(msg, at=None):
        off = toks[at][2] if at is not None and at < len(toks) else len(text)
        ln, cl = _linecol(text, off)
        raise ParseError(msg, ln + line - 1, cl + (col - 1 if ln == 1 else 0))

    def peek(k=0):
        return toks[i + k] if i + k < len(toks) else (None, None, len(text))

    def expect(val):
        nonlocal i
        if peek()[1] != val:
            err(f"expected {val!r}", i)
        i += 1

    def expr(env):
        nonlocal i
        kind, val, _ = peek()
        if kind != "name":
            err("expected a term", i)
        if val == "rec":
            i += 1
            kind, name, _ = peek()
            if kind != "name" or not name[0].isupper():
                err("rec binder must be an uppercase name", i)
            i += 1
            expect("=")
            ph = len(nodes)
            nodes.append(None)
            named[name] = ph
            body = expr({**env, name: ph})
            alias[ph] = body
            if peek()[1] == "in":
                i += 1
                if peek()[1] != name:
                    err(f"expected 'in {name}'", i)
                i += 1
            return ph
        i += 1
        if val in env:
            return env[val]
        if peek()[1] == "(":
            i += 1
            kids = [expr(env)]
            while peek()[1] == ",":
                i += 1
                kids.append(expr(env))
            expect(")")
            if signature is not None:
                if val not in signature:
                    err(f"unknown function symbol {val}", i - 1)
                if signature.arity(val) != len(kids):
                    err(f"{val} expects {signature.arity(val)} arguments, got {len(kids)}", i - 1)
            nodes.append((val, tuple(kids)))
            return len(nodes) - 1
        if signature is not None and val != CUT:
            if val in signature:
                if signature.arity(val) != 0:
                    err(f"{val} expects {signature.arity(val)} arguments", i - 1)
                nodes.append((val, ()))
            elif val[0].islower():
                nodes.append((val, None))
            else:
                err(f"unknown constant {val}", i - 1)
        elif _DEFAULT_VARS.match(val):
            nodes.append((val, None))
        else:
            nodes.append((val, ()))
        return len(nodes) - 1

    root = expr({})
    if i != len(toks):
        err("trailing input", i)

    def resolve(n):
        seen = set()
        while n in alias:
            if n in seen:
                raise ParseError("unguarded recursion", line, col)
            seen.add(n)
            n = alias[n]
        return n

    fixed = []
    for node in nodes:
        if node is None:
            fixed.append(("\0alias", ()))
            continue
        sym, kids = node
        fixed.append((sym, None if kids is None else tuple(resolve(k) for k in kids)))
    raw = Term(fixed, resolve(root))
    if binders is not None:
        ren = {n: j for j, n in enumerate(raw.reachable())}
        binders.update({x: ren[resolve(ph)] for x, ph in named.items() if resolve(ph) in ren})
    return raw._gc()


def format_term(t: Term) -> str:
    t = t.canonical()
    nodes = t.nodes
    # back-edge targets need a binder
    targets, on_path, done = set(), set(), set()
    stack = [(t.root, iter(nodes[t.root][1] or ()))]
    on_path.add(t.root)
    while stack:
        n, it = stack[-1]
        k = next(it, None)
        if k is None:
            stack.pop()
            on_path.discard(n)
            done.add(n)
            continue
        if k in on_path:
            targets.add(k)
        elif k not in done:
            on_path.add(k)
            stack.append((k, iter(nodes[k][1] or ())))
    names = {}
    letters = "XYZWVU"

    def name_for(n):
        if n not in names:
            j = len(names)
            names[n] = letters[j % 6] + (str(j // 6) if j >= 6 else "")
        return names[n]

    def show(n, bound):
        if n in bound:
            return name_for(n)
        sym, kids = nodes[n]
        if kids is None or not kids:
            body = sym
        else:
            inner = bound | {n} if n in targets else bound
            body = f"{sym}({','.join(show(k, inner) for k in kids)})"
        if n in targets:
            return f"rec {name_for(n)} = {body}"
        return body

    return show(t.root, frozenset())
