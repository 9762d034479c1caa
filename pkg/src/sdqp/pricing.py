"""Linear pricing over the feasible region (optionally intersected with cuts).

The pricing step minimizes grad'(x - x_k) over X, where X carries the
original rows plus any active shrinking cuts.  Three execution strategies
share one contract:

- ``lp_solve``: one dense bounded-variable simplex solve over all columns.
- ``sifting_solve``: restricted solves over a working column set, pricing the
  remaining columns via the duals — the right tool when n >> m.
- early stopping: either path may halt at the first vertex whose objective
  clears a cutoff, trading pricing exactness for iteration count.

Cuts are inequalities grad_i'(x - x_i) <= 0 collected from earlier iterates;
convexity guarantees they never exclude any point with a lower objective, in
particular the optimum.
"""

from dataclasses import dataclass, field

import numpy as np

from ._simplex_lp import LpError, LpResult, solve_bounded_lp

RCOST_TOL = 1e-9
CUT_PRUNE_SLACK = 1e-7
DEFAULT_CUT_CAP = 100
VERTEX_FEAS_TOL = 1e-8


@dataclass
class Cut:
    a: np.ndarray  # gradient at the originating iterate
    beta: float  # a'x_i, so the cut reads a'x <= beta
    origin_iter: int
    active: bool = True


@dataclass
class CutPool:
    """Bounded pool of shrinking cuts with slack-based pruning."""

    cap: int = DEFAULT_CUT_CAP
    cuts: list = field(default_factory=list)

    def active_cuts(self):
        return [c for c in self.cuts if c.active]

    def add_cut(self, x_k, grad_k, iter_index):
        """Store grad_k'(x - x_k) <= 0; no-op once iter_index reaches the cap."""
        if iter_index >= self.cap:
            return False
        a = np.array(grad_k, dtype=float)
        self.cuts.append(Cut(a, float(a @ x_k), iter_index))
        return True

    def prune_inactive(self, last_vertex):
        """Drop cuts slack at the last pricing solution (slack > tolerance)."""
        if last_vertex is None:
            return
        for c in self.cuts:
            if c.active and c.beta - c.a @ last_vertex > CUT_PRUNE_SLACK:
                c.active = False
        self.cuts = [c for c in self.cuts if c.active]


class LpProblem:
    """min g'x over the instance rows, bounds, and the active cuts.

    Internally lifted to equality form: one slack column per >=-row and one
    per cut row.  Columns are ordered [x | ineq slacks | cut slacks].
    """

    def __init__(self, inst, g, cuts=()):
        self.inst = inst
        self.g = np.asarray(g, dtype=float).ravel()
        self.cuts = list(cuts)
        n = inst.n
        n_in = inst.n_ineq
        n_cut = len(self.cuts)
        self.n = n
        self.n_rows = inst.n_eq + n_in + n_cut

        a_rows = []
        if inst.n_eq:
            a_rows.append(np.hstack([inst.A_eq, np.zeros((inst.n_eq, n_in + n_cut))]))
        if n_in:
            a_rows.append(np.hstack([inst.A_in, -np.eye(n_in), np.zeros((n_in, n_cut))]))
        if n_cut:
            cut_a = np.vstack([c.a for c in self.cuts])
            a_rows.append(np.hstack([cut_a, np.zeros((n_cut, n_in)), np.eye(n_cut)]))
        self.a = np.vstack(a_rows) if a_rows else np.zeros((0, n + n_in + n_cut))
        self.b = np.concatenate(
            [inst.b_eq, inst.b_in, [c.beta for c in self.cuts]])
        lo, hi = inst.bounds_arrays()
        self.lo = np.concatenate([lo, np.zeros(n_in + n_cut)])
        self.hi = np.concatenate([hi, np.full(n_in + n_cut, np.inf)])
        self.cost = np.concatenate([self.g, np.zeros(n_in + n_cut)])


@dataclass
class LpAnswer:
    vertex: np.ndarray  # x-part of the basic feasible solution
    value: float  # g'x
    duals: np.ndarray
    status: str  # optimal | cutoff
    pivots: int = 0
    work_columns: int = 0  # columns ever activated (sifting only)


@dataclass
class PricingOutcome:
    vertex: np.ndarray
    value: float  # grad'(vertex - x_k)
    status: str  # optimal | early_stopped
    pivots: int = 0
    work_columns: int = 0


def _to_answer(p, res):
    return LpAnswer(res.z[: p.n].copy(), float(p.g @ res.z[: p.n]),
                    res.duals.copy(), res.status, res.pivots)


def lp_solve(p, cutoff=None):
    """Solve the pricing LP over all columns; errors on infeasible/unbounded."""
    res = solve_bounded_lp(p.a, p.b, p.lo, p.hi, p.cost, cutoff=cutoff)
    if res.status == "infeasible":
        raise LpError("pricing LP infeasible: the region or cut pool is broken")
    return _to_answer(p, res)


def sifting_solve(p, work_set_init=None, batch=None, cutoff=None, max_rounds=200):
    """Solve the pricing LP by column sifting.

    Only x-columns are sifted; slack columns always stay in the working set.
    Columns outside the set are fixed at a finite bound (lower if available),
    and each round prices every column with the restricted duals, adding up
    to `batch` violators.  A clean pricing pass certifies global optimality.
    """
    n = p.n
    n_slack = p.a.shape[1] - n
    if batch is None:
        batch = max(50, p.n_rows)
    lo_fin = np.isfinite(p.lo[:n])
    hi_fin = np.isfinite(p.hi[:n])
    if not np.all(lo_fin | hi_fin):
        raise LpError("sifting requires every column to have a finite bound")
    fix_val = np.where(lo_fin, np.where(np.isfinite(p.lo[:n]), p.lo[:n], 0.0),
                       p.hi[:n])

    active = np.zeros(n, dtype=bool)
    if work_set_init is not None and len(work_set_init):
        active[np.asarray(work_set_init, dtype=int)] = True
    k = min(n, max(1, 2 * p.n_rows))
    active[np.argsort(-np.abs(p.g))[:k]] = True

    slack_cols = np.arange(n, n + n_slack)
    for _ in range(max_rounds):
        cols = np.concatenate([np.where(active)[0], slack_cols])
        fixed = ~active
        rhs = p.b - p.a[:, :n][:, fixed] @ fix_val[fixed]
        res = solve_bounded_lp(p.a[:, cols], rhs, p.lo[cols], p.hi[cols],
                               p.cost[cols],
                               cutoff=None if cutoff is None
                               else cutoff - float(p.g[fixed] @ fix_val[fixed]))
        if res.status == "infeasible":
            # grow the set with the columns most helpful for feasibility,
            # judged by phase-1 duals
            d1 = -(res.duals @ p.a[:, :n])
            viol = np.where(fixed & (((fix_val == p.lo[:n]) & (d1 < -RCOST_TOL))
                                     | ((fix_val == p.hi[:n]) & (d1 > RCOST_TOL))))[0]
            if viol.size == 0:
                raise LpError("pricing LP infeasible: the region or cut pool is broken")
            order = viol[np.argsort(-np.abs(d1[viol]))]
            active[order[:batch]] = True
            continue

        if res.status == "cutoff":
            return _lift(p, res, cols, fixed, fix_val)

        d = p.cost[:n] - res.duals @ p.a[:, :n]
        viol = np.where(fixed & (((fix_val == p.lo[:n]) & (d < -RCOST_TOL))
                                 | ((fix_val == p.hi[:n]) & (d > RCOST_TOL))))[0]
        if viol.size == 0:
            ans = _lift(p, res, cols, fixed, fix_val)
            ans.status = "optimal"
            return ans
        order = viol[np.argsort(-np.abs(d[viol]))]
        active[order[:batch]] = True
    raise LpError("sifting did not converge within the round limit")


def _lift(p, res, cols, fixed, fix_val):
    z = np.empty(p.a.shape[1])
    z[:p.n][fixed] = fix_val[fixed]
    z[cols] = res.z
    ans = LpAnswer(z[: p.n].copy(), float(p.g @ z[: p.n]), res.duals.copy(),
                   res.status, res.pivots)
    ans.work_columns = int(cols.size)
    return ans


@dataclass
class PricingOptions:
    early_stop: bool = False
    use_cuts: bool = False
    use_sifting: bool = False
    early_eps_scale: float = 1e-4  # eps = scale * (1 + |f(x_k)|)


def early_eps(opts, f_k):
    return opts.early_eps_scale * (1.0 + abs(f_k))


def price(inst, x_k, grad, pool=None, opts=None, f_k=None, support=None):
    """One pricing call: minimize grad'(x - x_k) over X (and active cuts).

    Returns a PricingOutcome whose `value` is the pricing objective relative
    to x_k; value >= -tol certifies SD optimality of x_k.  With early
    stopping, the LP halts at the first vertex with value <= -eps.
    """
    opts = opts or PricingOptions()
    cuts = pool.active_cuts() if (opts.use_cuts and pool is not None) else ()
    p = LpProblem(inst, grad, cuts)
    base = float(np.asarray(grad) @ x_k)
    cutoff = None
    if opts.early_stop:
        eps = early_eps(opts, 0.0 if f_k is None else f_k)
        cutoff = base - eps
    if opts.use_sifting:
        ans = sifting_solve(p, work_set_init=support, cutoff=cutoff)
    else:
        ans = lp_solve(p, cutoff=cutoff)
    value = ans.value - base
    status = "early_stopped" if ans.status == "cutoff" else "optimal"
    return PricingOutcome(ans.vertex, value, status, ans.pivots, ans.work_columns)


def vertex_feasibility_error(inst, x, cuts=()):
    """Max violation of rows, bounds, and cuts at x (diagnostic helper)."""
    errs = [0.0]
    if inst.n_eq:
        errs.append(float(np.max(np.abs(inst.A_eq @ x - inst.b_eq))))
    if inst.n_ineq:
        errs.append(float(max(0.0, np.max(inst.b_in - inst.A_in @ x))))
    lo, hi = inst.bounds_arrays()
    errs.append(float(max(0.0, np.max(lo - x), np.max(x - hi))))
    for c in cuts:
        errs.append(float(max(0.0, c.a @ x - c.beta)))
    return max(errs)
