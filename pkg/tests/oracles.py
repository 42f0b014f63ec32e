"""Reference implementations used only by the tests.

These work on plain nested tuples and strings and share no code with the
package beyond reading a Term's node table.
"""

from collections import deque
from itertools import product

CUT = "▢"


# -- trees --------------------------------------------------------------------------
# A tree is ("sym", child, ...) for function symbols and constants, or a str variable.


def tree(t, d=None):
    """Unfold a package Term into a nested tuple (cut at depth d)."""
    def go(n, r):
        sym, kids = t.nodes[n]
        if kids is None:
            return sym
        if kids and r == 0:
            return (CUT,)
        return (sym,) + tuple(go(k, None if r is None else r - 1) for k in kids)
    return go(t.root, d)


def parse(text):
    """Tiny parser: f(a,x) with single-letter-or-word names; lowercase x,y,z.. are vars."""
    text = text.replace(" ", "")
    pos = 0

    def expr():
        nonlocal pos
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] in "_'"):
            pos += 1
        name = text[start:pos]
        if pos < len(text) and text[pos] == "(":
            pos += 1
            args = [expr()]
            while text[pos] == ",":
                pos += 1
                args.append(expr())
            assert text[pos] == ")"
            pos += 1
            return (name,) + tuple(args)
        if name[0] in "xyzuvw":
            return name
        return (name,)
    out = expr()
    assert pos == len(text)
    return out


def show(tr):
    if isinstance(tr, str):
        return tr
    if len(tr) == 1:
        return tr[0]
    return tr[0] + "(" + ",".join(show(k) for k in tr[1:]) + ")"


def positions(tr, p=()):
    yield p
    if not isinstance(tr, str):
        for i, k in enumerate(tr[1:], 1):
            yield from positions(k, p + (i,))


def at(tr, p):
    for i in p:
        tr = tr[i]
    return tr


def put(tr, p, u):
    if not p:
        return u
    i = p[0]
    return tr[:i] + (put(tr[i], p[1:], u),) + tr[i + 1:]


def match(pat, tr, sub=None):
    sub = dict(sub or {})
    if isinstance(pat, str):
        if pat in sub and sub[pat] != tr:
            return None
        sub[pat] = tr
        return sub
    if isinstance(tr, str) or tr[0] != pat[0] or len(tr) != len(pat) or tr[0] == CUT:
        return None
    for a, b in zip(pat[1:], tr[1:]):
        sub = match(a, b, sub)
        if sub is None:
            return None
    return sub


def inst(tr, sub):
    if isinstance(tr, str):
        return sub[tr]
    return (tr[0],) + tuple(inst(k, sub) for k in tr[1:])


def rewrite(tr, p, lhs, rhs):
    sub = match(lhs, at(tr, p))
    if sub is None:
        return None
    return put(tr, p, inst(rhs, sub))


def redexes(rules, tr):
    """All (position, rule name) with a match; rules: {name: (lhs, rhs)} trees."""
    out = []
    for p in positions(tr):
        for name, (l, _) in sorted(rules.items()):
            if match(l, at(tr, p)) is not None:
                out.append((p, name))
    return out


def rules_of(trs):
    return {r.name: (tree(r.lhs), tree(r.rhs)) for r in trs.rules}


def pattern_positions(lhs, p=()):
    if isinstance(lhs, str):
        return set()
    out = {p}
    for i, k in enumerate(lhs[1:], 1):
        out |= pattern_positions(k, p + (i,))
    return out


def trees_of_size(funs, leaves, n):
    """All trees with exactly n nodes (funs: {sym: arity}; leaves given as trees)."""
    if n == 1:
        return list(leaves)
    out = []
    for f, k in funs.items():
        if k == 0:
            continue
        for split in _compositions(n - 1, k):
            for kids in product(*(trees_of_size(funs, leaves, m) for m in split)):
                out.append((f,) + kids)
    return out


def _compositions(n, k):
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


# -- S/P words --------------------------------------------------------------------


def sp_bfs(word, target, d, cap=200_000):
    """Literal search over all SP/PS deletions of a finite word; True if target^d can lead."""
    seen = {word}
    todo = deque([word])
    while todo:
        w = todo.popleft()
        if w.startswith(target * d):
            return True
        for i in range(len(w) - 1):
            if w[i] != w[i + 1]:
                u = w[:i] + w[i + 2:]
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
                    if len(seen) > cap:
                        raise RuntimeError("search space too large")
    return False


def sp_decompose(word, target, d):
    """w = z0 T z1 T ... z_{d-1} T rest with each z_i balanced, searched exhaustively."""
    n = len(word)
    reach = {0}
    for _ in range(d):
        nxt = set()
        for i in reach:
            bal = 0
            for k in range(i, n):
                if bal == 0 and word[k] == target:
                    nxt.add(k + 1)
                bal += 1 if word[k] == "S" else -1
        if not nxt:
            return False
        reach = nxt
    return True


def walk(word):
    s, out = 0, [0]
    for c in word:
        s += 1 if c == "S" else -1
        out.append(s)
    return out


# -- collapse counterexample ---------------------------------------------------------


def reducts_truncated(rules, tr, steps):
    """Trees reachable from a finite tree in <= steps single steps (no rewriting under CUT)."""
    seen = {tr}
    frontier = {tr}
    for _ in range(steps):
        nxt = set()
        for s in frontier:
            for p, name in redexes(rules, s):
                u = rewrite(s, p, *rules[name])
                if u not in seen:
                    nxt.add(u)
        seen |= nxt
        frontier = nxt
    return seen


def cut(tr, d):
    if isinstance(tr, str) or len(tr) == 1:
        return tr
    if d == 0:
        return (CUT,)
    return (tr[0],) + tuple(cut(k, d - 1) for k in tr[1:])


# -- superposition -------------------------------------------------------------------


def overlay(a, b):
    """Most general common instance of two linear trees with disjoint variables."""
    if isinstance(a, str):
        return b
    if isinstance(b, str):
        return a
    if a[0] != b[0] or len(a) != len(b):
        return None
    kids = [overlay(x, y) for x, y in zip(a[1:], b[1:])]
    if any(k is None for k in kids):
        return None
    return (a[0],) + tuple(kids)


def tag(tr, suffix):
    if isinstance(tr, str):
        return tr + suffix
    return (tr[0],) + tuple(tag(k, suffix) for k in tr[1:])


def critical_peaks(rules):
    """(outer, inner, position, peak, left, right) for every overlap; rules is [(name, lhs, rhs)]."""
    out = []
    for i, (n1, l1, r1) in enumerate(rules):
        for j, (n2, l2, r2) in enumerate(rules):
            a, b = tag(l1, "#1"), tag(l2, "#2")
            for p in sorted(pattern_positions(l1)):
                if p == () and j <= i:
                    continue
                inner = overlay(at(a, p), b)
                if inner is None:
                    continue
                peak = put(a, p, inner)
                left = rewrite(peak, (), a, tag(r1, "#1"))
                right = rewrite(peak, p, b, tag(r2, "#2"))
                out.append((n1, n2, p) + normalize(peak, left, right))
    return out


def normalize(*trees):
    names = {}

    def visit(tr):
        if isinstance(tr, str):
            names.setdefault(tr, f"x{len(names) + 1}")
        else:
            for k in tr[1:]:
                visit(k)

    def ren(tr):
        if isinstance(tr, str):
            return names[tr]
        return (tr[0],) + tuple(ren(k) for k in tr[1:])
    for tr in trees:
        visit(tr)
    return tuple(ren(tr) for tr in trees)


def all_trees(signature, max_size, variables=("x",)):
    """Every tree over the signature with at most max_size nodes."""
    funs = {f: k for f, k in signature.items() if k > 0}
    leaves = [(c,) for c, k in signature.items() if k == 0] + list(variables)
    out = []
    for n in range(1, max_size + 1):
        out.extend(trees_of_size(funs, leaves, n))
    return out


def same_effect_violations(rules, tr):
    """Distinct overlapping redex pairs of tr whose one-step targets differ."""
    rs = redexes(rules, tr)
    bad = []
    for i, (p, a) in enumerate(rs):
        for q, b in rs[i + 1:]:
            lo, hi, outer = (p, q, a) if len(p) <= len(q) else (q, p, b)
            if hi[:len(lo)] != lo or hi[len(lo):] not in pattern_positions(rules[outer][0]):
                continue
            if rewrite(tr, p, *rules[a]) != rewrite(tr, q, *rules[b]):
                bad.append((p, a, q, b))
    return bad


def ep_prefix(head, period, n):
    text = head + period * (n // len(period) + 1)
    return text[:n]


def crossval_ep(head, period, upper, lower, depth=6):
    """Compare claimed heights of head·period^ω with brute-force reachability of S^d / P^d.

    Returns the (target, d, claimed, found) tuples that disagree.
    """
    n = len(head) + len(period) * (len(head) + depth + 2)
    text = ep_prefix(head, period, n)
    bad = []
    for target, h in (("S", upper), ("P", -lower)):
        ds = [depth] if h == float("inf") else [h, h + 1]
        for d in ds:
            if d < 1:
                continue
            claimed = h >= d
            found = sp_decompose(text, target, d)
            if claimed != found:
                bad.append((target, d, claimed, found))
    return bad


def ep_corpus(rng, sample, max_head=40, max_period=6, exhaustive_head=3):
    """All periods up to max_period with every head up to exhaustive_head letters,
    plus a seeded sample with longer heads."""
    words = []
    periods = ["".join(p) for n in range(1, max_period + 1) for p in product("SP", repeat=n)]
    heads = ["".join(h) for n in range(exhaustive_head + 1) for h in product("SP", repeat=n)]
    words += [(h, p) for h in heads for p in periods]
    for _ in range(sample):
        h = "".join(rng.choice("SP") for _ in range(rng.randint(exhaustive_head + 1, max_head)))
        words.append((h, rng.choice(periods)))
    return words
