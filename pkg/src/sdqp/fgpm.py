"""Gradient-projection solver for the master QP over the simplex.

Each iteration projects a fixed-steplength antigradient point onto the
simplex, takes the difference as the search direction, and picks the step
with a nonmonotone Armijo backtracking rule whose starting stepsize comes
from a spectral (Barzilai-Borwein style) estimate of the previous iteration's
curvature.  Objective and gradient updates use the exact quadratic expansion
(the master objective is a known quadratic), with periodic recomputation to
bound drift.
"""

from dataclasses import dataclass, field
from collections import deque

import numpy as np

from .projection import project_simplex_fast

try:
    from . import _fgpm

    HAVE_COMPILED_FGPM = True
except ImportError:  # pragma: no cover - depends on the build environment
    HAVE_COMPILED_FGPM = False

RECOMPUTE_EVERY = 64
MAX_BACKTRACKS = 60
_STATUS_CODES = {0: "stationary", 1: "iter_limit", 2: "search_failed"}


@dataclass
class FgpmParams:
    s: float = None  # fixed projection steplength; default 1/||H||_inf
    rho_min: float = 1e-10
    rho_max: float = 1e10
    rho0: float = 1.0
    gamma1: float = 1e-4
    delta: float = 0.5
    m_memory: int = 10
    tol: float = 1e-6
    max_iters: int = 100000

    def __post_init__(self):
        if not 0 < self.rho_min <= self.rho_max:
            raise ValueError("need 0 < rho_min <= rho_max")
        if not 0 < self.gamma1 < 0.5:
            raise ValueError("gamma1 must lie in (0, 1/2)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


def master_gradient(state, lam=None):
    """Gradient of the master objective at lam: H lam + h = B(2Qx + c)."""
    return state.gradient(lam)


def armijo_spectral(state, lam, d, rho_k, params, f_bar, f0=None, g=None,
                    record=None):
    """Nonmonotone Armijo backtracking plus the spectral stepsize update.

    Starts from alpha = min(rho_k, 1) — the cap keeps lam + alpha*d inside the
    simplex, since lam + d is the projected point — and halves (by `delta`)
    until  f(lam + alpha d) <= f_bar + gamma1 * alpha * g'd.  The next
    maximum stepsize is rho_max when the curvature b_k = alpha d'y_k is
    nonpositive, else clamp(a_k/b_k, rho_min, rho_max) with a_k =
    alpha^2 ||d||^2.

    Returns (alpha, rho_next, accepted) where accepted is False if the
    backtrack limit was hit.
    """
    h_mat = state.h_mat
    if g is None:
        g = state.gradient(lam)
    if f0 is None:
        f0 = state.value(lam)
    gd = float(g @ d)
    hd = h_mat @ d
    dhd = float(d @ hd)

    alpha = min(float(rho_k), 1.0)
    accepted = False
    for _ in range(MAX_BACKTRACKS + 1):
        f_new = f0 + alpha * gd + 0.5 * alpha * alpha * dhd
        if f_new <= f_bar + params.gamma1 * alpha * gd:
            accepted = True
            break
        alpha *= params.delta
    b_k = alpha * alpha * dhd  # alpha * d'(grad(lam+alpha d) - grad(lam))
    if b_k <= 0.0:
        rho_next = params.rho_max
    else:
        a_k = alpha * alpha * float(d @ d)
        rho_next = min(params.rho_max, max(params.rho_min, a_k / b_k))
    if record is not None:
        record.append({
            "f_bar": f_bar, "f0": f0, "alpha": alpha, "gd": gd,
            "f_new": f0 + alpha * gd + 0.5 * alpha * alpha * dhd,
            "armijo_rhs": f_bar + params.gamma1 * alpha * gd,
            "b_k": b_k, "rho_next": rho_next, "accepted": accepted,
        })
    return alpha, rho_next, accepted


@dataclass
class FgpmInfo:
    lam: np.ndarray
    value: float
    iterations: int
    status: str  # stationary | iter_limit | search_failed
    residual: float
    record: list = field(default_factory=list)


def solve_master_fgpm(state, params=None, record_steps=False,
                      use_compiled=None):
    """Run the projected-gradient master solve from state.lam.

    Stops when the fixed-point residual ||P(lam - s grad) - lam||_inf drops
    to params.tol; hitting the iteration cap returns the best iterate with
    status "iter_limit".  state.lam is updated in place.

    The compiled loop is used when built unless per-step records are
    requested (those need the Python path); `use_compiled` forces one path
    for comparisons.
    """
    params = params or FgpmParams()
    if state.k == 1:
        state.lam = np.ones(1)
        return FgpmInfo(state.lam, state.value(), 0, "stationary", 0.0)

    h_mat, h_vec = state.h_mat, state.h_vec
    s = params.s
    if s is None:
        hnorm = float(np.linalg.norm(h_mat, np.inf))
        s = 1.0 / hnorm if hnorm > 0 else 1.0

    if use_compiled is None:
        use_compiled = HAVE_COMPILED_FGPM and not record_steps
    if use_compiled:
        lam, it, code, residual = _fgpm.fgpm_loop(
            np.ascontiguousarray(h_mat), np.ascontiguousarray(h_vec),
            np.ascontiguousarray(state.lam), s, params.rho0, params.rho_min,
            params.rho_max, params.gamma1, params.delta, params.m_memory,
            params.tol, params.max_iters, RECOMPUTE_EVERY, MAX_BACKTRACKS)
        state.lam = lam
        return FgpmInfo(lam, state.value(lam), it, _STATUS_CODES[code],
                        residual, [])

    lam = state.lam.copy()
    f0 = state.value(lam)
    g = state.gradient(lam)
    window = deque([f0], maxlen=params.m_memory + 1)
    rho = params.rho0
    record = [] if record_steps else None
    status = "iter_limit"
    residual = np.inf

    it = 0
    for it in range(1, params.max_iters + 1):
        lam_hat = project_simplex_fast(lam - s * g)
        d = lam_hat - lam
        residual = float(np.max(np.abs(d)))
        if residual <= params.tol:
            status = "stationary"
            break
        f_bar = max(window)
        alpha, rho, ok = armijo_spectral(state, lam, d, rho, params, f_bar,
                                         f0=f0, g=g, record=record)
        if not ok:
            status = "search_failed"
            break
        gd = float(g @ d)
        hd = h_mat @ d
        lam = lam + alpha * d
        if it % RECOMPUTE_EVERY == 0:
            f0 = state.value(lam)
            g = state.gradient(lam)
        else:
            f0 = f0 + alpha * gd + 0.5 * alpha * alpha * float(d @ hd)
            g = g + alpha * hd
        window.append(f0)

    state.lam = lam
    return FgpmInfo(lam, state.value(lam), it, status, residual,
                    record if record is not None else [])
