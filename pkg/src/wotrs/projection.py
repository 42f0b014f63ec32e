"""Residuals, weakly orthogonal projection, strip tiling and depth-budgeted joins."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (BudgetExhausted, CollapsingRulesPresent, InvalidStep,
                     InvariantViolation)
from .orthogonalize import (cross_conflicts, orthogonalize_developments,
                            orthogonalize_parallel, require_wo)
from .redex import (Development, ParallelStep, Redex, RedexSet, apply_step,
                    develop, find_redexes, is_redex)
from .sequences import FiniteSequence, OmegaSequence, as_single, is_omega
from .terms import Term, eq_to_depth, is_prefix, unfold
from .trs import TRS, check_rules

INF = float("inf")


# -- residuals -------------------------------------------------------------------


def _var_occurrences(rule, x, cap):
    occ = rule.rhs_occurrences(x, cap)
    if not rule.rhs.is_finite and len(rule.rhs_occurrences(x, cap + len(rule.rhs.nodes))) != len(occ):
        raise BudgetExhausted(f"rule {rule.name} copies {x} infinitely often")
    return occ


def residuals_after(a: Redex, v: Redex, cap: int = 64) -> list[Redex]:
    """Residuals of ``a`` after contracting ``v`` (the two must not conflict)."""
    if a == v:
        return []
    p, q = v.position, a.position
    if not is_prefix(p, q) or p == q:
        if p == q:
            raise InvalidStep(f"{a} and {v} overlap")
        return [a]
    rel = q[len(p):]
    if rel in v.rule.pattern_positions:
        raise InvalidStep(f"{a} and {v} overlap")
    for x, vps in v.rule.var_positions.items():
        vp = vps[0]
        if is_prefix(vp, rel):
            rest = rel[len(vp):]
            return [Redex(p + op + rest, a.rule) for op in _var_occurrences(v.rule, x, cap)]
    raise InvalidStep(f"{a} is not below a variable of {v}")


def project(t: Term, A, B) -> tuple[Term, list[Redex]]:
    """Develop ``B`` innermost-first, tracking residuals of ``A``. Returns (target, residuals)."""
    res = set(A)
    cur = t
    for v in sorted(B, key=lambda r: (-r.depth, r.position, r.rule.name)):
        nxt = set()
        for a in res:
            nxt.update(residuals_after(a, v))
        res = nxt
        cur = apply_step(cur, v)
    return cur, sorted(res)


def project_orthogonal(alpha: ParallelStep, beta: ParallelStep) -> ParallelStep:
    if alpha.source != beta.source:
        raise ValueError("steps are not co-initial")
    A, B = alpha.redexes.materialize(alpha.source), beta.redexes.materialize(beta.source)
    if cross_conflicts(A, B):
        raise InvalidStep("steps overlap; orthogonalize first")
    tgt, res = project(alpha.source, A, B)
    return ParallelStep(tgt, RedexSet(frozenset(res)))


def wo_project(trs: TRS, alpha: ParallelStep, beta: ParallelStep) -> ParallelStep:
    """alpha/beta: orthogonalize, then take orthogonal residuals."""
    a2, b2 = orthogonalize_parallel(trs, alpha, beta)
    return project_orthogonal(a2, b2)


def unit(t: Term) -> ParallelStep:
    return ParallelStep(t, RedexSet())


def single(t: Term, r: Redex) -> ParallelStep:
    return ParallelStep(t, RedexSet(frozenset([r])))


def approx_equal(x: ParallelStep, y: ParallelStep) -> bool:
    """Same source, same target and same contracted redexes."""
    return (x.source == y.source and x.redexes.explicit == y.redexes.explicit
            and x.target() == y.target())


def is_unit(x: ParallelStep) -> bool:
    return not x.redexes


@dataclass
class CubeReport:
    holds: bool
    left: ParallelStep
    right: ParallelStep
    discrepancy: str = ""


def check_cube(trs: TRS, alpha: ParallelStep, beta: ParallelStep, gamma: ParallelStep) -> CubeReport:
    """Compare (α/β)/(γ/β) with (α/γ)/(β/γ)."""
    left = wo_project(trs, wo_project(trs, alpha, beta), wo_project(trs, gamma, beta))
    right = wo_project(trs, wo_project(trs, alpha, gamma), wo_project(trs, beta, gamma))
    if left.source != right.source:
        return CubeReport(False, left, right, f"sources differ: {left.source} vs {right.source}")
    if left.redexes.explicit != right.redexes.explicit:
        return CubeReport(False, left, right, f"redex sets differ: {left} vs {right}")
    if left.target() != right.target():
        return CubeReport(False, left, right, f"targets differ: {left.target()} vs {right.target()}")
    return CubeReport(True, left, right)


# -- depth lifting -----------------------------------------------------------------


def min_depth(x) -> float:
    return x.min_depth if isinstance(x, ParallelStep) else min((r.depth for r in x), default=INF)


@dataclass
class LiftReport:
    d_alpha: float
    d_beta: float
    d_alpha_over_beta: float
    d_beta_over_alpha: float
    bound_alpha_over_beta: float
    bound_beta_over_alpha: float
    collapse_free: bool

    @property
    def ok(self) -> bool:
        return (self.d_alpha_over_beta >= self.bound_alpha_over_beta
                and self.d_beta_over_alpha >= self.bound_beta_over_alpha)


def lift_bounds(da, db, collapse_free):
    if collapse_free:
        return min(da, db + 1), min(db, da + 1)
    return min(da, db), min(da, db)


def depth_lift_bound(trs: TRS, alpha: ParallelStep, beta: ParallelStep) -> LiftReport:
    da, db = alpha.min_depth, beta.min_depth
    ab, ba = wo_project(trs, alpha, beta), wo_project(trs, beta, alpha)
    cf = not check_rules(trs).collapsing_rules
    b1, b2 = lift_bounds(da, db, cf)
    rep = LiftReport(da, db, ab.min_depth, ba.min_depth, b1, b2, cf)
    if not rep.ok:
        raise InvariantViolation(f"projection depth bound violated: {rep}")
    return rep


# -- strip ---------------------------------------------------------------------------


@dataclass
class StripResult:
    n: int                     # number of σ steps tiled
    bottom: list               # projections of σ's steps, parallel steps from t2 onwards
    right: ParallelStep        # limit parallel step from t1
    left_end: Term             # end of the bottom row
    right_end: Term            # target of ``right``
    limit: Term                # common approximant to depth d
    d: int
    d_sigma: float
    d_alpha: float
    bound_bottom: float
    bound_right: float

    @property
    def bottom_depth(self) -> float:
        return min((s.min_depth for s in self.bottom), default=INF)


def strip(trs: TRS, sigma, alpha: ParallelStep, d: int) -> StripResult:
    """Tile elementary diagrams of σ (length <= ω) against α, to depth d."""
    require_wo(trs)
    seq = as_single(sigma)
    if seq.source != alpha.source:
        raise ValueError("sequence and step are not co-initial")
    p = max(trs.max_pattern_depth, 1)
    n = seq.mod(d + p + 1) if is_omega(seq) else len(seq)
    cf = not check_rules(trs).collapsing_rules
    d_sigma = seq.min_depth()
    d_alpha = alpha.min_depth
    bound_bottom, bound_right = lift_bounds(d_sigma, d_alpha, cf)
    a = alpha
    bottom = []
    for i in range(n):
        st = single(seq.term(i), seq.redex_at(i) if is_omega(seq) else seq.redexes[i])
        low = wo_project(trs, st, a)
        a = wo_project(trs, a, st)
        bottom.append(low)
        if low.min_depth < bound_bottom or a.min_depth < bound_right:
            raise InvariantViolation(f"strip bound violated at diagram {i}")
    left_end = a.target()
    t1 = seq.target
    keep = [r for r in a.redexes.explicit if r.depth <= d]
    for r in keep:
        if not is_redex(t1, r):
            raise InvariantViolation(f"redex {r} does not survive to the limit")
    right = ParallelStep(t1, RedexSet(frozenset(keep)))
    right_end = right.target()
    if not eq_to_depth(left_end, right_end, d):
        raise InvariantViolation(f"strip diagram does not close at depth {d}")
    return StripResult(n, bottom, right, left_end, right_end, unfold(right_end, d), d,
                       d_sigma, d_alpha, bound_bottom, bound_right)


# -- confluence join -----------------------------------------------------------------


def tile(trs: TRS, top: list[ParallelStep], left: list[ParallelStep]):
    """Complete the grid spanned by two co-initial lists of parallel steps.

    Returns (right column from the end of ``top``, bottom row from the end of ``left``).
    """
    row = list(top)
    right_col = []
    for y in left:
        new_row = []
        for x in row:
            new_row.append(wo_project(trs, x, y))
            y = wo_project(trs, y, x)
        right_col.append(y)
        row = new_row
    return right_col, row


def agreement_depth(t: Term, u: Term, cap: int = 256) -> int:
    """Largest k <= cap with eq_to_depth(t, u, k)."""
    lo = 0
    if not eq_to_depth(t, u, 0):
        return -1
    hi = 1
    while hi <= cap and eq_to_depth(t, u, hi):
        lo, hi = hi, hi * 2
    hi = min(hi, cap + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if eq_to_depth(t, u, mid):
            lo = mid
        else:
            hi = mid
    return lo


def _transport(trs: TRS, steps: list[ParallelStep], start: Term, p: int, d: int):
    """Replay parallel steps (defined on a finite-prefix term) on ``start``.

    Only redexes whose pattern fits in the region where both sides agree are moved.
    """
    out = []
    cur = start
    for st in steps:
        reach = agreement_depth(st.source, cur)
        keep = frozenset(r for r in st.redexes.explicit if r.depth + p <= reach and is_redex(cur, r))
        ps = ParallelStep(cur, RedexSet(keep))
        out.append(ps)
        cur = ps.target()
    return out, cur


@dataclass
class JoinResult:
    left_ext: list             # parallel steps from σ's end
    right_ext: list            # parallel steps from τ's end
    u_left: Term
    u_right: Term
    meet: Term                 # join of the finite prefixes
    d: int
    slack: int

    @property
    def u(self) -> Term:
        return unfold(self.u_left, self.d)


def _prefix_steps(seq, n):
    return [single(seq.term(i), seq.redex_at(i) if is_omega(seq) else seq.redexes[i]) for i in range(n)]


def require_collapse_free(trs: TRS):
    bad = check_rules(trs).collapsing_rules
    if bad:
        raise CollapsingRulesPresent(
            f"collapsing rules present ({', '.join(sorted(bad))}); confluence needs collapse-freeness")


def confluence_join(trs: TRS, sigma, tau, d: int, max_slack: int = 16) -> JoinResult:
    """Join two co-initial sequences (length <= ω) up to depth d."""
    require_wo(trs)
    require_collapse_free(trs)
    s1, s2 = as_single(sigma), as_single(tau)
    if s1.source != s2.source:
        raise ValueError("sequences are not co-initial")
    p = max(trs.max_pattern_depth, 1)
    slack = 0
    while slack <= max_slack:
        n1 = s1.mod(d + p + slack) if is_omega(s1) else len(s1)
        n2 = s2.mod(d + p + slack) if is_omega(s2) else len(s2)
        right_col, bottom_row = tile(trs, _prefix_steps(s1, n1), _prefix_steps(s2, n2))
        meet = right_col[-1].target() if right_col else (
            bottom_row[-1].target() if bottom_row else s1.source)
        left_ext, u_left = _transport(trs, right_col, s1.target, p, d)
        right_ext, u_right = _transport(trs, bottom_row, s2.target, p, d)
        if eq_to_depth(u_left, u_right, d):
            return JoinResult(left_ext, right_ext, u_left, u_right, meet, d, slack)
        slack = 2 * slack + 1
    raise BudgetExhausted(f"no join found to depth {d} within slack {max_slack}")


# -- diamond for developments ----------------------------------------------------------


@dataclass
class DiamondResult:
    U: Development             # orthogonalized
    V: Development
    close_U: Development       # from target(U): residuals of V
    close_V: Development       # from target(V): residuals of U
    u: Term
    d: int


def diamond_join(trs: TRS, U: Development, V: Development, d: int) -> DiamondResult:
    require_wo(trs)
    require_collapse_free(trs)
    t = U.source
    periodic = not (U.redexes.is_finite and V.redexes.is_finite)
    p = max(trs.max_pattern_depth, 1)
    budget = d + 2 * p + 1 if periodic else None
    ortho = orthogonalize_developments(trs, U, V, budget)
    if periodic:
        A = [r for r in ortho.U.redexes.materialize(t, budget)]
        B = [r for r in ortho.V.redexes.materialize(t, budget)]
    else:
        A = ortho.U.redexes.materialize(t)
        B = ortho.V.redexes.materialize(t)
    tU, resV = project(t, B, A)   # V's residuals after U
    tV, resU = project(t, A, B)
    close_U = Development(tU, RedexSet(frozenset(resV)))
    close_V = Development(tV, RedexSet(frozenset(resU)))
    uL, uR = close_U.target(), close_V.target()
    if not eq_to_depth(uL, uR, d):
        raise InvariantViolation("diamond does not close")
    if periodic:
        for dev, tgt in ((U, tU), (V, tV)):
            if not eq_to_depth(develop(t, dev.redexes, d), tgt, d):
                raise InvariantViolation("orthogonalized window changed a development target")
    return DiamondResult(ortho.U, ortho.V, close_U, close_V, uL, d)


# -- the collapsing counterexample ---------------------------------------------------


def reducts(trs: TRS, t: Term, steps: int, redex_depth: int = 8) -> set[Term]:
    """Terms reachable in at most ``steps`` single steps at depth < redex_depth."""
    seen = {t}
    frontier = {t}
    for _ in range(steps):
        nxt = set()
        for s in frontier:
            for r in find_redexes(trs, s, redex_depth):
                u = apply_step(s, r)
                if u not in seen:
                    nxt.add(u)
        seen |= nxt
        frontier = nxt
    return seen


def common_reduct_search(trs: TRS, t1: Term, t2: Term, steps: int = 3, redex_depth: int = 8):
    """Return a common reduct within ``steps`` steps, or None."""
    a, b = reducts(trs, t1, steps, redex_depth), reducts(trs, t2, steps, redex_depth)
    both = a & b
    return min(both, key=str) if both else None
