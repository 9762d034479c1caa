"""Dense bounded-variable revised simplex engine.

Solves  min g'z  s.t.  A z = b,  lo <= z <= hi  with a two-phase method:
signed artificial columns for phase 1, then the true objective with the
artificials pinned to [0, 0].  The basis inverse is kept explicitly (the row
count here is tiny) and refreshed every REFACTOR_EVERY pivots; entering
columns are picked by Dantzig pricing with a switch to Bland's rule after a
run of degenerate pivots.  The ratio test supports bound flips.  An optional
cutoff halts phase 2 at the first basic feasible solution whose objective
reaches the cutoff, which is how pricing realizes its early-stopping contract
while still returning a vertex.
"""

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9
RCOST_TOL = 1e-9
PIVOT_TOL = 1e-10
REFACTOR_EVERY = 50
DEGENERATE_SWITCH = 200


class LpError(RuntimeError):
    pass


class LpUnboundedError(LpError):
    pass


@dataclass
class LpResult:
    status: str  # optimal | cutoff | infeasible
    z: np.ndarray  # column values (a basic feasible solution when not infeasible)
    obj: float
    duals: np.ndarray  # one per row; phase-1 duals when infeasible
    reduced: np.ndarray  # reduced costs at termination (phase-1 when infeasible)
    basis: np.ndarray
    pivots: int


class _Simplex:
    def __init__(self, a, b, lo, hi):
        self.a = np.array(a, dtype=float)
        self.b = np.asarray(b, dtype=float).ravel()
        self.m = self.a.shape[0]
        self.lo = np.array(lo, dtype=float).ravel()
        self.hi = np.array(hi, dtype=float).ravel()
        if np.any(self.lo > self.hi + 1e-12):
            raise LpError("empty bound interval")
        self.pivots = 0
        self.degen_run = 0

    def _refactor(self):
        bmat = self.a[:, self.basis]
        try:
            self.binv = np.linalg.inv(bmat)
        except np.linalg.LinAlgError as exc:
            raise LpError(f"singular basis: {exc}") from None
        znb = self.z.copy()
        znb[self.basis] = 0.0
        self.z[self.basis] = self.binv @ (self.b - self.a @ znb)

    def _reduced_costs(self, cost):
        y = cost[self.basis] @ self.binv if self.m else np.zeros(0)
        return cost - y @ self.a, y

    def _choose_entering(self, d, bland):
        """Entering column and direction sign, or (None, 0) at optimality."""
        movable = ~self.in_basis & (self.hi - self.lo > 0.0)
        free = ~np.isfinite(self.lo) & ~np.isfinite(self.hi)
        at_lo = movable & (free | (self.z == self.lo))
        at_hi = movable & ~at_lo
        up = np.where((at_lo & (d < -RCOST_TOL)) | (free & movable & (d < -RCOST_TOL)))[0]
        dn = np.where((at_hi | (free & movable)) & (d > RCOST_TOL))[0]
        if up.size == 0 and dn.size == 0:
            return None, 0
        if bland:
            cu = int(up[0]) if up.size else self.n
            cd = int(dn[0]) if dn.size else self.n
            return (cu, +1) if cu <= cd else (cd, -1)
        bu = int(up[np.argmin(d[up])]) if up.size else None
        bd = int(dn[np.argmax(d[dn])]) if dn.size else None
        if bd is None or (bu is not None and -d[bu] >= d[bd]):
            return bu, +1
        return bd, -1

    def _pivot(self, j, sigma):
        """Move column j by sigma*t from its bound; flip or exchange basis."""
        w = self.binv @ self.a[:, j] if self.m else np.zeros(0)
        sw = sigma * w
        xb = self.z[self.basis]
        lo_b = self.lo[self.basis]
        hi_b = self.hi[self.basis]

        t_max = np.inf
        leave = -1
        leave_to = 0.0
        dec = sw > PIVOT_TOL  # basic value decreases toward its lower bound
        inc = sw < -PIVOT_TOL
        for i in np.where((dec & np.isfinite(lo_b)) | (inc & np.isfinite(hi_b)))[0]:
            if sw[i] > 0:
                t, bound = (xb[i] - lo_b[i]) / sw[i], lo_b[i]
            else:
                t, bound = (hi_b[i] - xb[i]) / (-sw[i]), hi_b[i]
            t = max(t, 0.0)
            if t < t_max - 1e-13 or (t < t_max + 1e-13 and
                                     (leave < 0 or self.basis[i] < self.basis[leave])):
                t_max = min(t, t_max)
                leave, leave_to = i, bound

        rng = self.hi[j] - self.lo[j]
        t_flip = rng if np.isfinite(rng) else np.inf
        if not np.isfinite(min(t_max, t_flip)):
            raise LpUnboundedError("improving ray with no blocking bound")
        self.degen_run = self.degen_run + 1 if min(t_max, t_flip) <= 1e-12 else 0

        if t_flip < t_max - 1e-13:
            self.z[self.basis] = xb - t_flip * sw
            self.z[j] = self.hi[j] if sigma > 0 else self.lo[j]
            return
        t = t_max
        self.z[self.basis] = xb - t * sw
        self.z[j] += sigma * t
        lv = self.basis[leave]
        self.z[lv] = leave_to
        self.basis[leave] = j
        self.in_basis[lv] = False
        self.in_basis[j] = True

        piv = w[leave]
        if abs(piv) < PIVOT_TOL:
            raise LpError("zero pivot element")
        row = self.binv[leave, :] / piv
        self.binv -= np.outer(w, row)
        self.binv[leave, :] = row
        self.pivots += 1
        if self.pivots % REFACTOR_EVERY == 0:
            self._refactor()

    def _run(self, cost, cutoff, max_iters):
        for _ in range(max_iters):
            d, y = self._reduced_costs(cost)
            if cutoff is not None and float(cost @ self.z) <= cutoff:
                return "cutoff", d, y
            j, sigma = self._choose_entering(d, bland=self.degen_run >= DEGENERATE_SWITCH)
            if j is None:
                return "optimal", d, y
            self._pivot(j, sigma)
        raise LpError("simplex iteration limit reached")

    def solve(self, cost, cutoff=None, max_iters=200000):
        scale = 1.0 + (float(np.max(np.abs(self.b))) if self.m else 0.0)
        n0 = self.a.shape[1]

        # bound-feasible start, then signed artificials close the row residual
        z0 = np.zeros(n0)
        fin_lo = np.isfinite(self.lo)
        fin_hi = np.isfinite(self.hi)
        z0[fin_lo] = self.lo[fin_lo]
        only_hi = ~fin_lo & fin_hi
        z0[only_hi] = self.hi[only_hi]
        r = self.b - self.a @ z0
        signs = np.where(r >= 0.0, 1.0, -1.0)
        self.a = np.hstack([self.a, np.diag(signs)]) if self.m else self.a
        self.lo = np.concatenate([self.lo, np.zeros(self.m)])
        self.hi = np.concatenate([self.hi, np.full(self.m, np.inf)])
        self.n = self.a.shape[1]
        self.z = np.concatenate([z0, np.abs(r)])
        self.basis = np.arange(n0, self.n)
        self.in_basis = np.zeros(self.n, dtype=bool)
        self.in_basis[self.basis] = True
        self.binv = np.diag(signs)

        if self.m:
            cost1 = np.zeros(self.n)
            cost1[n0:] = 1.0
            _, d1, y1 = self._run(cost1, cutoff=None, max_iters=max_iters)
            if float(cost1 @ self.z) > FEAS_TOL * scale:
                return LpResult("infeasible", self.z[:n0].copy(), np.inf,
                                y1.copy(), d1[:n0].copy(), self.basis.copy(), self.pivots)
            # pin artificials; basic ones stay at zero and leave via degenerate pivots
            self.hi[n0:] = 0.0
            self.z[n0:] = 0.0

        cost2 = np.concatenate([cost, np.zeros(self.m)])
        self.degen_run = 0
        status, d2, y2 = self._run(cost2, cutoff=cutoff, max_iters=max_iters)
        if self.m:
            self._refactor()  # tighten basic values before reporting
        obj = float(cost2 @ self.z)
        return LpResult(status, self.z[:n0].copy(), obj, y2.copy(),
                        d2[:n0].copy(), self.basis.copy(), self.pivots)


def solve_bounded_lp(a, b, lo, hi, cost, cutoff=None, max_iters=200000):
    """Solve min cost'z s.t. a z = b, lo <= z <= hi; see module docstring."""
    return _Simplex(np.atleast_2d(a) if np.size(a) else np.zeros((0, len(lo))), b, lo, hi) \
        .solve(np.asarray(cost, dtype=float), cutoff, max_iters)
