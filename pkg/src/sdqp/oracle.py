"""Reference solvers for small problems, independent of the main solver path.

``oracle_solve_qp`` runs a dense primal active-set method on the original QP
and certifies the result with an explicit KKT check (sufficient for global
optimality here because the objective is convex).  ``oracle_simplex_qp``
minimizes a quadratic over the unit simplex by enumerating every face.  Both
are deliberately simple and slow; they exist to pin down reference values.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lstsq, null_space
from scipy.optimize import linprog

from .problem import eval_objective

KKT_TOL = 1e-9
MAX_ORACLE_ROWS = 400
MAX_SIMPLEX_FACE_DIM = 8


class OracleError(RuntimeError):
    pass


class OracleBudgetError(OracleError):
    """Instance too large for the brute-force reference path."""


@dataclass
class KktSolution:
    """Certified optimum: primal point plus multipliers and residuals.

    `mult_ineq` covers general inequality rows and bound rows in one vector,
    ordered as `labels` describes: ("ineq", i), ("lb", j), ("ub", j).
    """

    x: np.ndarray
    f: float
    mult_eq: np.ndarray
    mult_ineq: np.ndarray
    labels: list
    active: list
    residuals: dict


def _ineq_rows(inst):
    """All >=-form rows: general inequalities, then finite lower/upper bounds."""
    rows = [inst.A_in]
    rhs = [inst.b_in]
    labels = [("ineq", i) for i in range(inst.n_ineq)]
    lo, hi = inst.bounds_arrays()
    eye = np.eye(inst.n)
    fin = np.where(np.isfinite(lo))[0]
    rows.append(eye[fin])
    rhs.append(lo[fin])
    labels.extend(("lb", int(j)) for j in fin)
    fin = np.where(np.isfinite(hi))[0]
    rows.append(-eye[fin])
    rhs.append(-hi[fin])
    labels.extend(("ub", int(j)) for j in fin)
    return np.vstack(rows), np.concatenate(rhs), labels


def _feasible_start(inst, objective):
    lo, hi = inst.bounds_arrays()
    bounds = list(zip([v if np.isfinite(v) else None for v in lo],
                      [v if np.isfinite(v) else None for v in hi]))
    res = linprog(
        objective,
        A_ub=-inst.A_in if inst.n_ineq else None,
        b_ub=-inst.b_in if inst.n_ineq else None,
        A_eq=inst.A_eq if inst.n_eq else None,
        b_eq=inst.b_eq if inst.n_eq else None,
        bounds=bounds,
        method="highs",
    )
    if res.status != 0:
        raise OracleError(f"feasible-start LP failed (status {res.status})")
    return res.x


def _independent_subset(base, candidates, rows, tol=1e-9):
    """Indices from `candidates` whose rows extend `base` to an independent set."""
    kept = []
    m = base
    for idx in candidates:
        r = rows[idx]
        if m.shape[0] == 0:
            dep = np.linalg.norm(r) <= tol
        else:
            sol, *_ = lstsq(m.T, r, lapack_driver="gelsd")
            dep = np.linalg.norm(m.T @ sol - r) <= tol * max(1.0, np.linalg.norm(r))
        if not dep:
            kept.append(idx)
            m = np.vstack([m, r[None, :]])
    return kept


def _polish(inst, rows, rhs, work):
    """Exact solve of the equality-constrained QP on the final active set."""
    a_w = np.vstack([inst.A_eq, rows[work]]) if (inst.n_eq or work) else np.zeros((0, inst.n))
    s_w = np.concatenate([inst.b_eq, rhs[work]])
    n = inst.n
    k = a_w.shape[0]
    kkt = np.zeros((n + k, n + k))
    kkt[:n, :n] = 2.0 * inst.Q
    kkt[:n, n:] = a_w.T
    kkt[n:, :n] = a_w
    rhs_v = np.concatenate([-inst.c, s_w])
    sol, *_ = lstsq(kkt, rhs_v, lapack_driver="gelsd")
    return sol[:n]


def oracle_solve_qp(inst, tol=KKT_TOL, max_iter=2000):
    """Solve a small convex QP to optimality with a primal active-set method.

    Returns a KktSolution whose residuals are verified below `tol`; raises
    OracleError if the method stalls or the KKT certificate cannot be met.
    The size guard keeps this strictly a desk-scale reference path.
    """
    rows, rhs, labels = _ineq_rows(inst)
    if inst.n_eq + len(labels) > MAX_ORACLE_ROWS or inst.n > MAX_ORACLE_ROWS:
        raise OracleBudgetError(
            f"instance too large for the oracle ({inst.n} vars, {len(labels)} rows)")

    last_err = None
    for attempt, objective in enumerate(
            (np.zeros(inst.n), inst.c, -inst.c, np.ones(inst.n))):
        try:
            x = _feasible_start(inst, objective)
            return _active_set_qp(inst, rows, rhs, labels, x, tol, max_iter,
                                  bland=attempt > 0)
        except OracleError as err:
            last_err = err
    raise OracleError(f"active-set method failed from all starts: {last_err}")


def _active_set_qp(inst, rows, rhs, labels, x, tol, max_iter, bland=False):
    n = inst.n
    scale = max(1.0, np.linalg.norm(inst.Q, np.inf), np.linalg.norm(inst.c, np.inf))
    slack = rows @ x - rhs
    active0 = [i for i in range(len(labels)) if slack[i] <= 1e-8 * scale]
    work = _independent_subset(inst.A_eq, active0, rows)

    stall = 0
    for _ in range(max_iter):
        g = 2.0 * (inst.Q @ x) + inst.c
        a_w = np.vstack([inst.A_eq, rows[work]]) if (inst.n_eq or work) else np.zeros((0, n))
        z = null_space(a_w) if a_w.shape[0] else np.eye(n)

        p = np.zeros(n)
        linear_ray = False
        if z.shape[1]:
            hr = z.T @ (2.0 * inst.Q) @ z
            gr = z.T @ g
            w_eig, v_eig = np.linalg.eigh(hr)
            thresh = 1e-10 * max(1.0, w_eig[-1] if w_eig.size else 1.0)
            pos = w_eig > thresh
            gv = v_eig.T @ gr
            flat_grad = v_eig[:, ~pos] @ gv[~pos] if (~pos).any() else np.zeros_like(gr)
            if np.linalg.norm(flat_grad) > 1e-10 * (1.0 + np.linalg.norm(g)):
                # zero-curvature descent on this face: walk to a blocking row
                p = z @ (-flat_grad)
                linear_ray = True
            else:
                p = z @ (-(v_eig[:, pos] @ (gv[pos] / w_eig[pos])))

        if not linear_ray and np.linalg.norm(p) <= 1e-11 * (1.0 + np.linalg.norm(x)):
            # stationary on the working face: check multiplier signs
            a_all = np.vstack([inst.A_eq, rows[work]]) if (inst.n_eq or work) else np.zeros((0, n))
            mults, *_ = lstsq(a_all.T, g, lapack_driver="gelsd") if a_all.shape[0] else (np.zeros(0),)
            mu_w = mults[inst.n_eq:]
            if mu_w.size == 0 or mu_w.min() >= -tol * scale:
                # polish on the final face; keep the iterate if the exact
                # face solve wanders off (singular system, flat objective)
                x_pol = _polish(inst, rows, rhs, work)
                ok = (rows @ x_pol - rhs).min() >= -1e-9 * scale if len(labels) else True
                if ok and inst.n_eq:
                    ok = np.max(np.abs(inst.A_eq @ x_pol - inst.b_eq)) <= 1e-9 * scale
                return _certify(inst, rows, rhs, labels, work,
                                x_pol if ok else x, tol)
            if bland or stall > 20:
                drop = min(i for i, m in enumerate(mu_w) if m < -tol * scale)
            else:
                drop = int(np.argmin(mu_w))
            work.pop(drop)
            stall += 1
            continue

        # ratio test over rows outside the working set
        slack = rows @ x - rhs
        rp = rows @ p
        cand = [i for i in range(len(labels))
                if i not in work and rp[i] < -1e-12 * (1.0 + np.linalg.norm(p))]
        alpha_bar = np.inf
        block = None
        for i in cand:
            a = max(slack[i], 0.0) / (-rp[i])
            if a < alpha_bar - 1e-14:
                alpha_bar, block = a, i
            elif abs(a - alpha_bar) <= 1e-14 and (block is None or i < block):
                block = i
        if linear_ray:
            if not np.isfinite(alpha_bar):
                raise OracleError("unbounded descent ray on a bounded region")
            alpha = alpha_bar
        else:
            alpha = min(1.0, alpha_bar)
        x = x + alpha * p
        if block is not None and alpha == alpha_bar:
            work.append(block)
            stall = stall + 1 if alpha <= 1e-14 else 0
        else:
            stall = 0
    raise OracleError("active-set iteration cap reached")


def _certify(inst, rows, rhs, labels, work, x, tol):
    scale = max(1.0, np.linalg.norm(inst.Q, np.inf), np.linalg.norm(inst.c, np.inf),
                np.linalg.norm(x, np.inf))
    g = 2.0 * (inst.Q @ x) + inst.c
    a_all = np.vstack([inst.A_eq, rows[work]]) if (inst.n_eq or work) else np.zeros((0, inst.n))
    mults, *_ = lstsq(a_all.T, g, lapack_driver="gelsd") if a_all.shape[0] else (np.zeros(0),)
    y = mults[:inst.n_eq]
    mu = np.zeros(len(labels))
    for j, wi in enumerate(work):
        mu[wi] = mults[inst.n_eq + j]

    stat = g - (inst.A_eq.T @ y if inst.n_eq else 0.0) - rows.T @ mu
    slack = rows @ x - rhs
    res = {
        "stationarity": float(np.linalg.norm(stat, np.inf)) / scale,
        "primal_eq": float(np.max(np.abs(inst.A_eq @ x - inst.b_eq))) / scale if inst.n_eq else 0.0,
        "primal_ineq": float(max(0.0, -slack.min())) / scale if len(labels) else 0.0,
        "dual": float(max(0.0, -mu.min())) if len(labels) else 0.0,
        "complementarity": float(np.max(np.abs(mu * slack))) / scale if len(labels) else 0.0,
    }
    worst = max(res.values())
    if worst > tol:
        raise OracleError(f"KKT certificate failed: {res}")
    return KktSolution(
        x=x,
        f=eval_objective(inst, x),
        mult_eq=y,
        mult_ineq=mu,
        labels=labels,
        active=[labels[i] for i in work],
        residuals=res,
    )


def oracle_simplex_qp(h_mat, h_vec, tol=1e-9):
    """Exact minimizer of 1/2 l'Hl + h'l over the unit simplex, k <= 8.

    Enumerates every face, solves the face's stationarity system, keeps the
    feasible candidates, and returns the best (ties broken by smaller norm).
    """
    h_mat = np.asarray(h_mat, dtype=float)
    h_vec = np.asarray(h_vec, dtype=float).ravel()
    k = h_vec.size
    if k > MAX_SIMPLEX_FACE_DIM:
        raise OracleBudgetError(f"k = {k} exceeds the face-enumeration limit")
    scale = max(1.0, np.linalg.norm(h_mat, np.inf), np.linalg.norm(h_vec, np.inf))
    best = None
    for mask in range(1, 1 << k):
        idx = [i for i in range(k) if mask >> i & 1]
        ks = len(idx)
        m = np.zeros((ks + 1, ks + 1))
        m[:ks, :ks] = h_mat[np.ix_(idx, idx)]
        m[:ks, ks] = -1.0
        m[ks, :ks] = 1.0
        rhs = np.concatenate([-h_vec[idx], [1.0]])
        sol, *_ = lstsq(m, rhs, lapack_driver="gelsd")
        if np.linalg.norm(m @ sol - rhs) > 1e-8 * scale:
            continue  # no finite stationary point on this face's affine hull
        lam_s = sol[:ks]
        if lam_s.min() < -tol:
            continue
        lam = np.zeros(k)
        lam[idx] = np.clip(lam_s, 0.0, None)
        lam /= lam.sum()
        val = 0.5 * lam @ h_mat @ lam + h_vec @ lam
        if best is None or val < best[0] - 1e-12 * scale or (
                abs(val - best[0]) <= 1e-12 * scale
                and np.linalg.norm(lam) < np.linalg.norm(best[1])):
            best = (val, lam)
    if best is None:
        raise OracleError("no feasible face candidate found")
    return best[1]
