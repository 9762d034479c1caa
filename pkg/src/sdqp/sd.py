"""Outer simplicial decomposition loop.

Alternates an inner-approximation master solve (conjugate directions or
projected gradient, over the convex hull of collected vertices) with an LP
pricing step over the full region.  Pricing value >= -tol certifies
optimality; otherwise the returned vertex enters the basis, the master is
re-solved from the warm start, and zero-weight vertices are dropped.

Inexact masters can re-price an existing vertex; the driver reacts by
re-solving the master at a tightened tolerance a few times before giving up,
and enforces strict descent with an exact fallback line minimization toward
the newest vertex.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .acdm import DirectionSet, exact_line_min, solve_master_acdm
from .fgpm import FgpmParams, solve_master_fgpm
from .master import MasterState
from .pricing import (CutPool, LpProblem, PricingOptions, early_eps,
                      lp_solve, price, sifting_solve)
from .problem import eval_gradient

PRICING_SETS = {
    "D": (False, False, False),  # (use_sifting, use_cuts, early_stop)
    "Sif": (True, False, False),
    "C": (False, True, False),
    "Sif-C": (True, True, False),
    "E": (False, False, True),
    "Sif-E": (True, False, True),
    "CE": (False, True, True),
    "Sif-CE": (True, True, True),
}


class SdError(RuntimeError):
    pass


@dataclass
class SdConfig:
    master: str = "acdm"  # acdm | fgpm | oracle_master (debug, tiny bases)
    use_sifting: bool = False
    use_cuts: bool = False
    early_stop: bool = False
    tol_sd: float = 1e-6  # relative: scaled by 1 + |f(x_k)|
    drop_tol: float = 1e-10
    time_limit_s: float = 1000.0
    max_iters: int = 10000
    seed: int = 0
    cut_cap: int = 100
    fgpm_tol: float = 1e-6
    acdm_kkt_tol: float = 1e-8
    record_vertices: bool = None  # None: automatic (small instances only)

    def __post_init__(self):
        if self.master not in ("acdm", "fgpm", "oracle_master"):
            raise ValueError(f"unknown master {self.master!r}")
        if self.tol_sd <= 0:
            raise ValueError("tol_sd must be positive")

    @property
    def pricing_label(self):
        for name, flags in PRICING_SETS.items():
            if flags == (self.use_sifting, self.use_cuts, self.early_stop):
                return name
        raise AssertionError("unreachable")

    @property
    def label(self):
        return f"{self.master}/{self.pricing_label}"

    @classmethod
    def from_label(cls, label, **kw):
        """Build a config from e.g. "acdm/Sif-CE" or "fgpm/D"."""
        master, _, pricing = label.partition("/")
        pricing = pricing or "D"
        if pricing not in PRICING_SETS:
            raise ValueError(f"unknown pricing set {pricing!r}")
        sif, cuts, early = PRICING_SETS[pricing]
        return cls(master=master, use_sifting=sif, use_cuts=cuts,
                   early_stop=early, **kw)


@dataclass
class TraceRow:
    iteration: int
    f: float
    pricing_value: float
    master_dim: int
    t: float
    pricing_status: str = "optimal"
    early_eps: float = 0.0
    pivots: int = 0


@dataclass
class SdTrace:
    rows: list = field(default_factory=list)
    status: str = "iter_limit"
    times: dict = field(default_factory=lambda: {
        "preprocessing": 0.0, "master": 0.0, "pricing": 0.0, "updating": 0.0})
    vertices: list = None  # every distinct vertex ever added (small runs)
    basis_history: list = None  # per-iteration tuples of vertex ids
    cuts_added: list = None  # (a, beta) for every cut ever stored


@dataclass
class SdResult:
    x: np.ndarray
    f: float
    status: str
    iterations: int
    master_dim: int
    trace: SdTrace
    label: str

    @property
    def solved(self):
        return self.status == "optimal"


def initialize(inst, config=None):
    """Starting basis: the single vertex minimizing c'x over the region."""
    config = config or SdConfig()
    p = LpProblem(inst, inst.c)
    ans = sifting_solve(p) if config.use_sifting else lp_solve(p)
    state = MasterState(inst)
    state.add_vertex(ans.vertex)
    state.lam = np.ones(1)
    return ans.vertex, state


def add_vertex(state, x, dirs=None):
    """Grow the basis by one vertex; keeps any direction set aligned."""
    idx = state.add_vertex(x)
    if dirs is not None:
        dirs.pad_coordinate()
    return idx


def drop_vertices(state, drop_tol=1e-10, dirs=None):
    """Apply the vertex dropping rule to the current weights.

    Indices with weight <= drop_tol leave the basis (the heaviest vertex is
    always retained); returns the kept indices in original positions.
    """
    lam = state.lam
    keep = np.where(lam > drop_tol)[0]
    if keep.size == 0:
        keep = np.array([int(np.argmax(lam))])
    if keep.size < lam.size:
        if dirs is not None and len(dirs):
            dirs.compact(keep)
        state.drop(keep)
    return keep


class _VertexLog:
    """Vertex identity tracking for trace post-mortems (small runs only)."""

    def __init__(self, enabled):
        self.enabled = enabled
        self.vertices = [] if enabled else None
        self.ids = []  # ids of current basis members, aligned with state

    def register(self, x):
        if not self.enabled:
            self.ids.append(-1)
            return
        for i, v in enumerate(self.vertices):
            if np.max(np.abs(v - x)) <= 1e-10:
                self.ids.append(i)
                return
        self.vertices.append(np.array(x))
        self.ids.append(len(self.vertices) - 1)

    def drop(self, keep):
        self.ids = [self.ids[i] for i in keep]


def _solve_master(config, state, dirs, d_bar, fgpm_params, kkt_tol):
    if config.master == "acdm":
        solve_master_acdm(state, dirs, d_bar, kkt_tol=kkt_tol,
                          drop_tol=config.drop_tol)
    elif config.master == "oracle_master":
        # face enumeration: exact but exponential in basis size, debug only
        from .oracle import oracle_simplex_qp
        state.lam = oracle_simplex_qp(state.h_mat, state.h_vec)
    else:
        solve_master_fgpm(state, fgpm_params)


def sd_solve(inst, config=None):
    """Run simplicial decomposition on a validated instance."""
    config = config or SdConfig()
    t_start = time.perf_counter()
    trace = SdTrace()
    opts = PricingOptions(early_stop=config.early_stop, use_cuts=config.use_cuts,
                          use_sifting=config.use_sifting)

    t0 = time.perf_counter()
    x0, state = initialize(inst, config)
    dirs = DirectionSet() if config.master == "acdm" else None
    pool = CutPool(cap=config.cut_cap)
    fgpm_params = FgpmParams(tol=config.fgpm_tol)
    kkt_tol = config.acdm_kkt_tol
    record = config.record_vertices
    if record is None:
        record = inst.n <= 120
    log = _VertexLog(record)
    log.register(x0)
    if record:
        trace.vertices = log.vertices
        trace.basis_history = []
        trace.cuts_added = []
    trace.times["preprocessing"] += time.perf_counter() - t0

    status = "iter_limit"
    f_prev = None
    for it in range(config.max_iters):
        t0 = time.perf_counter()
        x_k = state.x()
        f_k = state.value()
        g_k = eval_gradient(inst, x_k)
        trace.times["preprocessing"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        out = price(inst, x_k, g_k, pool, opts, f_k=f_k,
                    support=np.where(x_k > 1e-12)[0])
        trace.times["pricing"] += time.perf_counter() - t0

        eps = early_eps(opts, f_k) if config.early_stop else 0.0
        trace.rows.append(TraceRow(it, f_k, out.value, state.k,
                                   time.perf_counter() - t_start,
                                   out.status, eps, out.pivots))
        if record:
            trace.basis_history.append(tuple(log.ids))

        tol_abs = config.tol_sd * (1.0 + abs(f_k))
        if out.value >= -tol_abs:
            status = "optimal"
            break
        if time.perf_counter() - t_start > config.time_limit_s:
            status = "time_limit"
            break

        t0 = time.perf_counter()
        if config.use_cuts:
            pool.prune_inactive(out.vertex)
            if pool.add_cut(x_k, g_k, it) and record:
                trace.cuts_added.append((pool.cuts[-1].a.copy(), pool.cuts[-1].beta))
        trace.times["updating"] += time.perf_counter() - t0

        # An inexact master can stall the outer loop in two ways: pricing
        # returns a vertex already in the basis, or it keeps re-creating a
        # zero-weight vertex that the dropping rule just removed (no descent
        # between iterations).  Both are cured by tightening the master
        # tolerance and re-solving.
        stalled = f_prev is not None and f_k >= f_prev
        solved_in_retry = False
        for _ in range(5):
            if not stalled and state.find_vertex(out.vertex) < 0:
                break
            stalled = False
            kkt_tol *= 1e-2
            fgpm_params = replace(fgpm_params, tol=fgpm_params.tol * 1e-2)
            t0 = time.perf_counter()
            _solve_master(config, state, dirs, None, fgpm_params, kkt_tol)
            keep = drop_vertices(state, config.drop_tol, dirs)
            log.drop(keep)
            trace.times["master"] += time.perf_counter() - t0
            x_k = state.x()
            f_k = state.value()
            g_k = eval_gradient(inst, x_k)
            t0 = time.perf_counter()
            out = price(inst, x_k, g_k, pool, opts, f_k=f_k,
                        support=np.where(x_k > 1e-12)[0])
            trace.times["pricing"] += time.perf_counter() - t0
            tol_abs = config.tol_sd * (1.0 + abs(f_k))
            eps = early_eps(opts, f_k) if config.early_stop else 0.0
            trace.rows[-1] = TraceRow(it, f_k, out.value, state.k,
                                      time.perf_counter() - t_start,
                                      out.status, eps, out.pivots)
            if record:
                trace.basis_history[-1] = tuple(log.ids)
            if out.value >= -tol_abs:
                status = "optimal"
                solved_in_retry = True
                break
        else:
            raise SdError("pricing stalled: duplicate vertex after retries")
        if solved_in_retry:
            break
        f_prev = f_k

        t0 = time.perf_counter()
        add_vertex(state, out.vertex, dirs)
        log.register(out.vertex)
        lam_pad = state.lam.copy()
        d_bar = -lam_pad
        d_bar[-1] += 1.0
        trace.times["updating"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        _solve_master(config, state, dirs, d_bar, fgpm_params, kkt_tol)
        if state.k == lam_pad.size:
            # never do worse than the exact step toward the new vertex: the
            # pricing value is strictly negative here, so this guarantees
            # strict descent per iteration even with an inexact master
            beta = exact_line_min(lam_pad, lam_pad + d_bar, state.h_mat, state.h_vec)
            cand = lam_pad + beta * d_bar
            if state.value(cand) < state.value():
                state.lam = cand
        trace.times["master"] += time.perf_counter() - t0

        t0 = time.perf_counter()
        keep = drop_vertices(state, config.drop_tol, dirs)
        log.drop(keep)
        trace.times["updating"] += time.perf_counter() - t0

    trace.status = status
    x_final = state.x()
    return SdResult(x_final, state.value(), status, len(trace.rows),
                    state.k, trace, config.label)
