"""``wo``: command-line front end."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import dot, fixtures
from .compression import compress, compress_divergent
from .errors import InvariantViolation, WOError
from .orthogonalize import orthogonalize_developments, orthogonalize_parallel
from .projection import (check_cube, confluence_join, depth_lift_bound, diamond_join,
                         require_collapse_free, strip, wo_project)
from .redex import Development, ParallelStep, find_redexes, parse_redex_set
from .sequences import as_single, is_omega, parse_sequence
from .sp import classify, parse_word, reduce_toward, sum_graph, zero_word_factorization
from .terms import format_term, parse_term, unfold
from .trs import check_rules, critical_pairs, is_orthogonal, is_weakly_orthogonal, load_trs

FORMATS = ("text", "json", "csv", "dot")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    depth: int = 16
    prefix: int = 64
    format: str = "text"
    seed: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.depth < 1 or self.prefix < 1:
            raise ValueError("budgets must be positive")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")


@dataclass
class Outcome:
    status: int
    report: dict
    lines: list
    raw: str | None = None  # csv / dot payload


def _color(word: str) -> str:
    if os.environ.get("WO_COLOR") != "1":
        return word
    code = {"yes": 32, "no": 31}.get(word)
    return f"\x1b[{code}m{word}\x1b[0m" if code else word


def yn(b) -> str:
    return _color("yes" if b else "no")


def _load(path: str):
    p = Path(path)
    if not p.exists() and p.stem in fixtures.TRS_NAMES:
        return fixtures.trs(p.stem)
    try:
        return load_trs(p)
    except OSError as e:
        raise WOError(f"cannot read {path}: {e.strerror}") from None


def _term(cfg, trs, key="term"):
    text = cfg.options.get(key)
    if text is None:
        raise WOError(f"--{key} is required")
    binders: dict = {}
    return parse_term(text, trs.signature, binders=binders), binders


def _set(cfg, trs, key, binders):
    text = cfg.options.get(key)
    if text is None:
        raise WOError(f"--{key} is required")
    try:
        return parse_redex_set(text, trs, binders)
    except (KeyError, ValueError) as e:
        raise WOError(f"--{key}: {e}") from None


def _show(t, d):
    return format_term(t if t.is_finite else unfold(t, d)) if d is not None else format_term(t)


def _seq(cfg, trs, key="seq"):
    path = cfg.options.get(key)
    if path is None:
        raise WOError(f"--{key} is required")
    p = Path(path)
    if not p.exists() and fixtures.data_path(p.name).is_file():
        text = fixtures.data_path(p.name).read_text(encoding="utf-8")
    else:
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as e:
            raise WOError(f"cannot read {path}: {e.strerror}") from None
    return parse_sequence(text, trs)


# -- verbs --------------------------------------------------------------------------


def cmd_check(cfg):
    trs = _load(cfg.inputs[0])
    rc = check_rules(trs)
    v = is_weakly_orthogonal(trs)
    coll = ", ".join(sorted(rc.collapsing_rules)) or "none"
    lines = [f"left-linear: {yn(rc.left_linear)}",
             f"weakly orthogonal: {yn(v.ok)}; collapsing rules: {coll}",
             f"orthogonal: {yn(rc.left_linear and is_orthogonal(trs))}"]
    if v.witness is not None:
        lines.append(f"witness: {v.witness}")
    rep = {"left_linear": rc.left_linear, "weakly_orthogonal": v.ok,
           "orthogonal": bool(rc.left_linear and is_orthogonal(trs)),
           "collapsing_rules": sorted(rc.collapsing_rules),
           "witness": None if v.witness is None else str(v.witness)}
    return Outcome(0 if v.ok else 1, rep, lines)


def cmd_cps(cfg):
    trs = _load(cfg.inputs[0])
    cps = critical_pairs(trs)
    lines = [f"{'trivial' if c.trivial else 'NON-TRIVIAL'} {c}" for c in cps] or ["no critical pairs"]
    rep = {"pairs": [{"peak": str(c.peak), "left": str(c.left_reduct), "right": str(c.right_reduct),
                      "outer": c.outer_rule, "inner": c.inner_rule, "trivial": c.trivial} for c in cps]}
    return Outcome(0, rep, lines)


def cmd_redexes(cfg):
    trs = _load(cfg.inputs[0])
    t, _ = _term(cfg, trs)
    rs = find_redexes(trs, t, cfg.depth)
    lines = [str(r) for r in rs] or ["no redexes"]
    raw = dot.term_dot(t, cfg.depth, {r.position for r in rs}) if cfg.format == "dot" else None
    return Outcome(0, {"term": str(t), "depth": cfg.depth, "redexes": [str(r) for r in rs]}, lines, raw)


def cmd_develop(cfg):
    trs = _load(cfg.inputs[0])
    t, b = _term(cfg, trs)
    rs = _set(cfg, trs, "set", b)
    u = Development(t, rs).target(cfg.depth)
    shown = _show(u, None if rs.is_finite else cfg.depth)
    raw = dot.term_dot(u, cfg.depth) if cfg.format == "dot" else None
    return Outcome(0, {"source": str(t), "set": str(rs), "target": shown}, [f"target: {shown}"], raw)


def cmd_orthogonalize(cfg):
    trs = _load(cfg.inputs[0])
    t, b = _term(cfg, trs)
    U, V = _set(cfg, trs, "U", b), _set(cfg, trs, "V", b)
    if cfg.options.get("parallel"):
        a, c = orthogonalize_parallel(trs, ParallelStep(t, U), ParallelStep(t, V))
        lines = [f"U' = {a}", f"V' = {c}"]
        return Outcome(0, {"U": str(a), "V": str(c), "trace": [], "exhausted": False}, lines)
    res = orthogonalize_developments(trs, Development(t, U), Development(t, V), cfg.depth)
    lines = [str(e) for e in res.trace]
    lines += [f"U' = {res.U}", f"V' = {res.V}",
              f"frontier: {'none' if res.orthogonal else res.frontier}"]
    if res.exhausted:
        lines.append(f"budget exhausted: conflicts remain at depth >= {res.frontier}")
    rep = {"U": str(res.U), "V": str(res.V), "trace": [str(e) for e in res.trace],
           "exhausted": res.exhausted, "frontier": None if res.orthogonal else res.frontier}
    return Outcome(3 if res.exhausted else 0, rep, lines)


def cmd_project(cfg):
    trs = _load(cfg.inputs[0])
    t, b = _term(cfg, trs)
    a = ParallelStep(t, _set(cfg, trs, "alpha", b))
    c = ParallelStep(t, _set(cfg, trs, "beta", b))
    ab, ba = wo_project(trs, a, c), wo_project(trs, c, a)
    lift = depth_lift_bound(trs, a, c)
    lines = [f"alpha/beta = {ab} from {_show(ab.source, cfg.depth)}",
             f"beta/alpha = {ba} from {_show(ba.source, cfg.depth)}",
             f"depths: alpha {lift.d_alpha}, beta {lift.d_beta}, alpha/beta {lift.d_alpha_over_beta} "
             f">= {lift.bound_alpha_over_beta}, beta/alpha {lift.d_beta_over_alpha} >= {lift.bound_beta_over_alpha}"]
    rep = {"alpha_over_beta": str(ab), "beta_over_alpha": str(ba), "lift_ok": lift.ok}
    return Outcome(0, rep, lines)


def cmd_cube(cfg):
    trs = _load(cfg.inputs[0])
    t, b = _term(cfg, trs)
    steps = [ParallelStep(t, _set(cfg, trs, k, b)) for k in ("alpha", "beta", "gamma")]
    rep = check_cube(trs, *steps)
    lines = [f"cube identity: {'holds' if rep.holds else 'fails'}",
             f"(alpha/beta)/(gamma/beta) = {rep.left}", f"(alpha/gamma)/(beta/gamma) = {rep.right}"]
    if rep.discrepancy:
        lines.append(f"discrepancy: {rep.discrepancy}")
    return Outcome(0, {"holds": rep.holds, "left": str(rep.left), "right": str(rep.right)}, lines)


def cmd_strip(cfg):
    trs = _load(cfg.inputs[0])
    seq = _seq(cfg, trs)
    binders: dict = {}
    alpha = ParallelStep(seq.source, parse_redex_set(cfg.options.get("alpha") or "{}", trs, binders))
    res = strip(trs, seq, alpha, cfg.depth)
    lines = [f"tiled {res.n} diagrams", f"right step: {res.right}",
             f"bottom min depth {res.bottom_depth} >= {res.bound_bottom}; "
             f"right min depth {res.right.min_depth} >= {res.bound_right}",
             f"limit to depth {res.d}: {format_term(res.limit)}"]
    raw = None
    if cfg.format == "dot":
        single = as_single(seq)
        top = [single.term(i) for i in range(res.n + 1)] + [res.right.source]
        bottom = [b.source for b in res.bottom] + [res.left_end, res.right_end]
        labels = [str(single.step(i).redex) for i in range(res.n)] + ["…"]
        raw = dot.chain_dot("strip", [("alpha", top, labels),
                                      ("alpha", bottom, [str(b) for b in res.bottom] + ["…"])])
    rep = {"n": res.n, "right": str(res.right), "limit": format_term(res.limit), "d": res.d}
    return Outcome(0, rep, lines, raw)


def cmd_join(cfg):
    trs = _load(cfg.inputs[0])
    require_collapse_free(trs)
    s1, s2 = _seq(cfg, trs, "seq"), _seq(cfg, trs, "seq2")
    res = confluence_join(trs, s1, s2, cfg.depth)
    lines = [f"joined at depth {res.d} (slack {res.slack})", f"u = {format_term(res.u)}",
             f"left extension: {len(res.left_ext)} parallel steps; right extension: {len(res.right_ext)}"]
    raw = None
    if cfg.format == "dot":
        raw = dot.chain_dot("join", [("sigma", [s1.target, res.u_left], ["ext"]),
                                     ("tau", [s2.target, res.u_right], ["ext"])])
    return Outcome(0, {"u": format_term(res.u), "d": res.d, "slack": res.slack}, lines, raw)


def cmd_diamond(cfg):
    trs = _load(cfg.inputs[0])
    t, b = _term(cfg, trs)
    U, V = Development(t, _set(cfg, trs, "U", b)), Development(t, _set(cfg, trs, "V", b))
    res = diamond_join(trs, U, V, cfg.depth)
    lines = [f"U' = {res.U}", f"V' = {res.V}", f"close from target(U): {res.close_U}",
             f"close from target(V): {res.close_V}", f"u = {_show(res.u, cfg.depth)}"]
    return Outcome(0, {"U": str(res.U), "V": str(res.V), "u": _show(res.u, cfg.depth)}, lines)


def cmd_compress(cfg):
    trs = _load(cfg.inputs[0])
    seq = _seq(cfg, trs)
    K = cfg.prefix
    if cfg.options.get("divergent"):
        last = len(seq.segments) - 1
        tail = seq.segments[last]
        if not is_omega(tail) or tail.modulus is not None:
            raise WOError("--divergent needs a final segment without modulus")
        rep = compress_divergent(trs, seq, K, witness=lambda j: (last, j))
        lines = [f"depth {rep.depth}: {rep.hits} of {rep.K} steps (c = {rep.c})"]
        lines += [str(st.redex) for st in rep.steps]
        return Outcome(0, {"depth": rep.depth, "hits": rep.hits, "K": rep.K, "c": rep.c,
                           "steps": [str(st.redex) for st in rep.steps]}, lines)
    d = int(cfg.options.get("check_depth") or 20)
    rep = compress(trs, seq, d)
    out = rep.output
    steps = out.prefix(K)
    lines = [f"input: {rep.input_length}; output: {rep.output_length}",
             f"minimal depth {rep.min_depth}: {rep.steps_at_d_in} steps in, {rep.steps_at_d_out} out",
             f"limits agree to depth {rep.limit_agreement_depth}: {yn(rep.limit_agrees)}"]
    lines += [str(st.redex) for st in steps]
    return Outcome(0, {"input_length": str(rep.input_length), "output_length": rep.output_length,
                       "min_depth": rep.min_depth, "steps_at_d_in": rep.steps_at_d_in,
                       "steps_at_d_out": rep.steps_at_d_out, "limit_agreement_depth": d,
                       "steps": [str(st.redex) for st in steps]}, lines)


def _h(x):
    return "+∞" if x == float("inf") else ("−∞" if x == float("-inf") else x)


def cmd_sp(cfg):
    verb = cfg.options.get("sp_verb")
    try:
        w = parse_word(cfg.inputs[0])
    except ValueError as e:
        raise WOError(str(e)) from None
    if verb == "classify":
        c = classify(w, max(cfg.depth, 1) * 64)
        rep = {"word": str(w), "upper": _h(c.upper_height), "lower": _h(c.lower_height), "in_A": c.in_A,
               "in_B": c.in_B, "root_active": c.root_active, "sn_inf": c.sn_inf, "exact": c.exact}
        try:
            zs = zero_word_factorization(w, 3, max(cfg.depth, 1) * 64)
            rep["zero_words"] = zs
        except WOError:
            rep["zero_words"] = None
        return Outcome(0, rep, [str(c)])
    if verb == "graph":
        g = sum_graph(w, cfg.depth)
        raw = "n,sum\n" + "".join(f"{n},{s}\n" for n, s in g)
        return Outcome(0, {"word": str(w), "sums": [s for _, s in g]},
                       [" ".join(str(s) for _, s in g)], raw if cfg.format == "csv" else None)
    if verb == "witness":
        target = cfg.options.get("target") or "S"
        wit = reduce_toward(w, target, cfg.depth)
        seq = wit.sequence()
        lines = [str(wit), f"validated {len(seq)} term steps"]
        return Outcome(0, {"word": str(w), "target": target, "depth": cfg.depth,
                           "prefix_length": len(wit.start), "steps": wit.steps, "end": wit.end}, lines)
    raise WOError(f"unknown sp verb {verb!r}")


VERBS = {"check": cmd_check, "cps": cmd_cps, "redexes": cmd_redexes, "develop": cmd_develop,
         "orthogonalize": cmd_orthogonalize, "project": cmd_project, "cube": cmd_cube,
         "strip": cmd_strip, "join": cmd_join, "diamond": cmd_diamond, "compress": cmd_compress,
         "sp": cmd_sp}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, output text)."""
    try:
        if cfg.command not in VERBS:
            raise WOError(f"unknown verb {cfg.command!r}")
        out = VERBS[cfg.command](cfg)
    except InvariantViolation as e:
        out = Outcome(1, {"error": str(e)}, [f"violation: {e}"])
    except WOError as e:
        out = Outcome(e.exit_code, {"error": str(e)}, [f"error: {e}"])
        if cfg.command in ("diamond", "join") and "collapsing" in str(e):
            out.lines.append("note: with a collapsing rule such as f(x,y) -> x, rec X = f(f(X,b),a) "
                             "reduces to rec Y = f(Y,a) and to rec Z = f(Z,b), which have no common reduct")
    if cfg.format == "json":
        doc = {"command": cfg.command, "exit_code": out.status, "seed": cfg.seed, "report": out.report}
        return out.status, json.dumps(doc, ensure_ascii=False, sort_keys=True, default=str) + "\n"
    if cfg.format in ("csv", "dot") and out.raw is not None:
        return out.status, out.raw
    if cfg.format in ("csv", "dot") and "error" not in out.report:
        return 2, f"error: format {cfg.format} not supported by {cfg.command}\n"
    return out.status, "\n".join(out.lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wo", description="weakly orthogonal infinitary rewriting toolkit")
    ap.add_argument("--format", choices=FORMATS, default="text")
    ap.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def verb(name, *opts, inputs=1):
        p = sub.add_parser(name)
        if inputs:
            p.add_argument("inputs", nargs=inputs)
        p.add_argument("--depth", "-d", type=int, default=16)
        p.add_argument("--prefix", "-K", type=int, default=64)
        p.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        for o in opts:
            if o in ("parallel", "divergent"):
                p.add_argument(f"--{o}", action="store_true")
            else:
                p.add_argument(f"--{o.replace('_', '-')}", dest=o)
        return p

    verb("check")
    verb("cps")
    verb("redexes", "term")
    verb("develop", "term", "set")
    verb("orthogonalize", "term", "U", "V", "parallel")
    verb("project", "term", "alpha", "beta")
    verb("cube", "term", "alpha", "beta", "gamma")
    verb("strip", "seq", "alpha")
    verb("join", "seq", "seq2")
    verb("diamond", "term", "U", "V")
    verb("compress", "seq", "check_depth", "divergent")
    sp = verb("sp", "target", inputs=0)
    sp.add_argument("sp_verb", choices=("classify", "graph", "witness"))
    sp.add_argument("inputs", nargs=1)
    sp.add_argument("--csv", action="store_const", const="csv", dest="format", default=argparse.SUPPRESS)
    return ap


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    base = {k: ns.pop(k) for k in ("command", "inputs", "depth", "prefix", "format", "seed") if k in ns}
    return RunConfig(options=ns, **base)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    status, text = run(cfg)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
