"""Adaptive conjugate-directions solver for the master QP over the simplex.

One pass works a queue of seed directions: each seed is made conjugate to the
stored set by Gram-Schmidt deflation, the feasible half-line through it is
intersected with the simplex boundary, and an exact one-dimensional quadratic
minimization picks the step.  An interior optimum over the current span ends
the pass; a boundary hit pins the vanished coordinates at zero, clears the
direction set, and reseeds from the surviving support.

Passes repeat until the simplex KKT conditions hold over the *whole* simplex,
so a pinned coordinate that still prices negative is reactivated by the
restart seeds and the returned point is the exact master minimizer (to
tolerance), not just a stationary point of the single sweep.  Coordinates
left at zero weight are the caller's to remove.  Conjugate directions survive
in `dirs` across calls and are reused by later masters after coordinate
padding.
"""

from dataclasses import dataclass, field

import numpy as np

CONJ_SKIP_CURV = 1e-12  # relative curvature below which a direction is flat
ZERO_DIR_TOL = 1e-12
KKT_TOL = 1e-8
DROP_ZERO_TOL = 1e-10
MAX_PASSES = 500


class MasterSolveError(RuntimeError):
    pass


@dataclass
class DirectionSet:
    """Mutually conjugate barycentric directions, reusable across masters."""

    directions: list = field(default_factory=list)

    def __len__(self):
        return len(self.directions)

    def reset(self):
        self.directions.clear()

    def add(self, d):
        self.directions.append(np.asarray(d, dtype=float))

    def pad_coordinate(self):
        """Extend every direction with a zero entry for a freshly added vertex."""
        self.directions = [np.append(d, 0.0) for d in self.directions]

    def compact(self, keep):
        """Restrict to surviving coordinates; reset if any direction would lose
        a nonzero component (conjugacy would not survive the projection)."""
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.where(keep)[0]
        mask = np.ones(self.directions[0].size if self.directions else 0, dtype=bool)
        mask[keep] = False
        for d in self.directions:
            if d.size and np.max(np.abs(d[mask]), initial=0.0) > ZERO_DIR_TOL:
                self.reset()
                return
        self.directions = [d[keep] for d in self.directions]

    def conjugacy_error(self, h_mat):
        """Largest normalized |d_i' H d_j|, i != j; ignores flat directions."""
        ds = self.directions
        worst = 0.0
        scale = max(1.0, float(np.linalg.norm(h_mat, np.inf)))
        hd = [h_mat @ d for d in ds]
        curv = [float(d @ hdi) for d, hdi in zip(ds, hd)]
        for i in range(len(ds)):
            if curv[i] <= CONJ_SKIP_CURV * scale:
                continue
            for j in range(i + 1, len(ds)):
                if curv[j] <= CONJ_SKIP_CURV * scale:
                    continue
                val = abs(float(ds[i] @ hd[j])) / np.sqrt(curv[i] * curv[j])
                worst = max(worst, val)
        return worst


def conjugate_against(d_bar, dirs, h_mat):
    """Deflate d_bar against the stored set: d = d_bar - sum (d'Hd_j/d_j'Hd_j) d_j.

    Projections are applied sequentially (modified Gram-Schmidt), which is the
    numerically stable realization of the same map.  Flat directions
    (curvature below CONJ_SKIP_CURV * ||H||) are skipped; a fully deflated
    result returns None.
    """
    d_bar = np.asarray(d_bar, dtype=float)
    d = d_bar.copy()
    scale = max(1.0, float(np.linalg.norm(h_mat, np.inf)))
    for dj in dirs.directions:
        hdj = h_mat @ dj
        denom = float(dj @ hdj)
        if denom <= CONJ_SKIP_CURV * scale:
            continue
        d = d - (float(d @ hdj) / denom) * dj
    if np.linalg.norm(d) <= ZERO_DIR_TOL * max(np.linalg.norm(d_bar), 1e-300):
        return None
    return d


def max_feasible_step(lam_s, lam_t):
    """Largest alpha >= 0 keeping (1-alpha)*lam_s + alpha*lam_t nonnegative.

    Equals (max_i (lam_s_i - lam_t_i)/lam_s_i)^-1 over the shrinking
    coordinates; 0 when a zero coordinate would go negative; None when the
    direction is (numerically) zero.
    """
    lam_s = np.asarray(lam_s, dtype=float)
    lam_t = np.asarray(lam_t, dtype=float)
    d = lam_t - lam_s
    shrink = d < 0
    if not shrink.any():
        return None if np.max(np.abs(d), initial=0.0) <= 1e-15 else np.inf
    if np.any(shrink & (lam_s <= 0.0)):
        return 0.0
    ratios = (lam_s[shrink] - lam_t[shrink]) / lam_s[shrink]
    return 1.0 / float(np.max(ratios))


def exact_line_min(lam_s, lam_p, h_mat, h_vec):
    """argmin over beta in [0,1] of the master objective on [lam_s, lam_p].

    Flat segments (p'Hp <= 0) go all the way when the linear term descends.
    """
    p = np.asarray(lam_p, dtype=float) - np.asarray(lam_s, dtype=float)
    g = h_mat @ lam_s + h_vec
    gp = float(g @ p)
    curv = float(p @ h_mat @ p)
    if curv <= 0.0:
        return 1.0 if gp < 0.0 else 0.0
    return min(1.0, max(0.0, -gp / curv))


def simplex_kkt_residual(g, lam, supp_tol=1e-12):
    """Stationarity residual for min over the simplex, normalized by 1+|g|.

    On the support, multipliers force g_i equal; off it, g_i may only exceed
    that common value.
    """
    g = np.asarray(g, dtype=float)
    lam = np.asarray(lam, dtype=float)
    nu = float(g @ lam)
    supp = lam > supp_tol
    res = float(np.max(np.abs(g[supp] - nu)))
    if (~supp).any():
        res = max(res, float(np.max(nu - g[~supp], initial=0.0)))
    return res / (1.0 + float(np.max(np.abs(g))))


@dataclass
class AcdmInfo:
    lam: np.ndarray
    value: float
    conjugate_steps: int
    passes: int
    dropped: tuple  # indices at zero weight in the solution
    boundary_hits: int


def _snap(lam):
    lam = np.maximum(lam, 0.0)
    lam[lam <= 1e-15] = 0.0
    s = lam.sum()
    return lam / s


def _restart_seeds(lam, g, support_only=False):
    """Directions from the point to every vertex, steepest descent first.

    With `support_only`, seeds only target vertices carrying weight, so the
    sweep stays on the face reached by a boundary hit.
    """
    seeds = []
    nu = float(g @ lam)
    for j in np.argsort(g - nu):
        if support_only and lam[j] <= 0.0:
            continue
        d = -lam.copy()
        d[j] += 1.0
        seeds.append(d)
    return seeds


def solve_master_acdm(state, dirs, d_bar=None, kkt_tol=KKT_TOL,
                      drop_tol=DROP_ZERO_TOL, max_passes=MAX_PASSES):
    """Minimize the master QP over the simplex; returns AcdmInfo.

    `d_bar` is the barycentric image of the latest pricing direction (the new
    vertex minus the incumbent); when None, the solve seeds from every vertex
    as after a boundary restart.  `state.lam` is updated in place; vertices
    at zero weight in the solution stay in `state` for the caller's dropping
    rule (`AcdmInfo.dropped` lists their indices).
    """
    if state.k == 1:
        state.lam = np.ones(1)
        dirs.reset()
        return AcdmInfo(state.lam, state.value(), 0, 0, (), 0)

    lam = _snap(state.lam.copy())
    steps = 0
    hits = 0
    queue = [np.asarray(d_bar, dtype=float)] if d_bar is not None else \
        _restart_seeds(lam, state.gradient(lam))

    for n_pass in range(1, max_passes + 1):
        while queue:
            d = conjugate_against(queue.pop(0), dirs, state.h_mat)
            if d is None:
                continue
            # orient along descent so the segment search is an exact line
            # minimization (the expanding-subspace argument needs this)
            if float(state.gradient(lam) @ d) > 0.0:
                d = -d
            alpha = max_feasible_step(lam, lam + d)
            if alpha is None or alpha <= 0.0:
                # descent along this line is blocked by the boundary; the
                # KKT restart resolves whichever violation remains
                continue
            lam_p = lam + alpha * d if np.isfinite(alpha) else lam + d
            lam_p = np.maximum(lam_p, 0.0)
            lam_p /= lam_p.sum()
            beta = exact_line_min(lam, lam_p, state.h_mat, state.h_vec)
            steps += 1
            if beta < 1.0:
                lam = lam + beta * (lam_p - lam)
                dirs.add(d)
                continue
            # boundary hit: land on lam_p, pin the vanished coordinates at
            # zero and sweep the surviving face with fresh seeds
            hits += 1
            lam = _snap(lam_p)
            dirs.reset()
            queue = _restart_seeds(lam, state.gradient(lam), support_only=True)

        g = state.gradient(lam)
        if simplex_kkt_residual(g, lam) <= kkt_tol:
            dropped = tuple(np.flatnonzero(lam <= drop_tol).tolist())
            state.lam = lam
            return AcdmInfo(lam, state.value(lam), steps, n_pass, dropped, hits)
        # full-simplex restart: seeds toward every vertex, which reactivates
        # any pinned coordinate that still prices below the support level
        dirs.reset()
        queue = _restart_seeds(lam, g)
    raise MasterSolveError("conjugate-directions master did not meet the KKT tolerance")
