"""Graphviz DOT emission for terms and reduction diagrams."""

from __future__ import annotations

from .terms import Term, format_term, unfold


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph(name: str, nodes, edges, rankdir: str = "TB") -> str:
    """nodes: (id, label, attrs dict); edges: (src, dst, label, attrs dict)."""
    out = [f"digraph {_q(name)} {{", f"  rankdir={rankdir};", "  node [fontname=monospace];"]
    for nid, label, attrs in nodes:
        extra = "".join(f", {k}={_q(v)}" for k, v in sorted(attrs.items()))
        out.append(f"  {_q(nid)} [label={_q(label)}{extra}];")
    for a, b, label, attrs in edges:
        extra = "".join(f", {k}={_q(v)}" for k, v in sorted(attrs.items()))
        out.append(f"  {_q(a)} -> {_q(b)} [label={_q(label)}{extra}];")
    out.append("}")
    return "\n".join(out) + "\n"


def term_dot(t: Term, depth: int = 8, marked=()) -> str:
    """Tree unfolding to ``depth``; positions in ``marked`` are filled."""
    marked = set(marked)
    nodes, edges = [], []
    stack = [((), t.root, 0)]
    while stack:
        p, n, dd = stack.pop()
        sym, kids = t.nodes[n]
        pid = "p" + ".".join(map(str, p))
        attrs = {"style": "filled", "fillcolor": "lightblue"} if p in marked else {}
        cut = kids and dd >= depth
        nodes.append((pid, "▢" if cut else sym, attrs))
        if kids and not cut:
            for i, k in enumerate(kids, 1):
                q = p + (i,)
                edges.append((pid, "p" + ".".join(map(str, q)), str(i), {}))
                stack.append((q, k, dd + 1))
    nodes.sort(key=lambda x: x[0])
    edges.sort(key=lambda x: (x[0], x[1]))
    return graph("term", nodes, edges)


def short(t: Term, depth: int = 4) -> str:
    return format_term(unfold(t, depth))


def chain_dot(name: str, rows) -> str:
    """Rows of (label, [terms], [step labels]); consecutive rows are linked column-wise."""
    nodes, edges = [], []
    for r, (label, terms, steps) in enumerate(rows):
        for c, t in enumerate(terms):
            nodes.append((f"r{r}c{c}", short(t), {}))
        for c, s in enumerate(steps):
            edges.append((f"r{r}c{c}", f"r{r}c{c + 1}", s, {}))
        if r:
            prev = rows[r - 1][1]
            for c in range(min(len(prev), len(terms))):
                edges.append((f"r{r - 1}c{c}", f"r{r}c{c}", label, {"style": "dashed"}))
    return graph(name, nodes, edges, "LR")
