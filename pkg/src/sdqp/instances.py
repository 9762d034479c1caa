"""Test-bed generators: synthetic dense QPs and mean-variance portfolio QPs.

Synthetic instances come in six classes named by their constraint mix:

====== ==========================================================
S      step-wise 0/1 covering rows only
S-b    step-wise rows plus the budget row e'x = 1
S-rb   step-wise rows plus the relaxed budget slb <= e'x <= sub
R      dense random rows only
R-b    random rows plus budget
R-rb   random rows plus relaxed budget
====== ==========================================================

All synthetic classes carry box bounds 0 <= x <= 1 so the feasible region is
bounded even without a budget row.  The quadratic has spectrum {3i/n},
i = 1..n, in an orthogonal basis drawn from a seeded QR factorization, and
linear costs are uniform in [0.05, 0.4].

Portfolio instances are min x' Sigma x s.t. r'x >= mu, e'x = 1, x >= 0 with
Sigma and r estimated from a time-series panel (assets x periods).
"""

from dataclasses import dataclass, field

import numpy as np

from .problem import QpInstance

CLASSES = ("S", "S-b", "S-rb", "R", "R-b", "R-rb")
DEFAULT_SLB = 0.9
DEFAULT_SUB = 1.1
DEFAULT_AUGMENT_ETA = 0.05
MU_GRID = (0.006, 0.007, 0.008, 0.009, 0.01)


def _rng(seed):
    # accepts ints and SeedSequence objects alike
    return np.random.default_rng(seed)


def generate_q(n, seed):
    """Dense symmetric PSD matrix with eigenvalues 3i/n, i = 1..n.

    The eigenbasis is the Q-factor of a seeded random normal matrix, so the
    spectrum is exact up to eigensolver noise while the matrix itself is
    fully dense.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    m = rng.standard_normal((n, n))
    u, _ = np.linalg.qr(m)
    sigma = 3.0 * np.arange(1, n + 1) / n
    q = (u * sigma) @ u.T
    return 0.5 * (q + q.T)


def generate_linear_cost(n, seed):
    """Linear cost with entries uniform in [0.05, 0.4]."""
    return _rng(seed).uniform(0.05, 0.4, size=n)


def generate_stepwise_constraints(n, m, seed):
    """Step-wise covering rows: m 0/1 rows of s = floor(2n/(m+1)) ones each.

    Row i (1-based) has its ones on the s consecutive positions starting at
    1 + (s/2)(i-1); consecutive rows overlap in s/2 positions.  Windows
    running past n are truncated (reported in the metadata dict).  The rhs is
    f_i * s / n with f_i uniform in [0.4, 1] per row.

    Returns (A, b, meta).
    """
    s = (2 * n) // (m + 1)
    if m < 1 or s < 2:
        raise ValueError(f"need floor(2n/(m+1)) >= 2, got s={s} for n={n}, m={m}")
    rng = _rng(seed)
    a = np.zeros((m, n))
    truncated = []
    for i in range(m):
        start = (s * i) // 2
        stop = start + s
        if stop > n:
            stop = n
            truncated.append(i)
        a[i, start:stop] = 1.0
    f = rng.uniform(0.4, 1.0, size=m)
    b = f * s / n
    meta = {"s": s, "truncated_rows": truncated}
    return a, b, meta


def generate_random_constraints(n, m, seed):
    """Dense random rows A_ij ~ U[0,1] with rhs 0.75*row_min + 0.25*row_max."""
    if m < 1:
        raise ValueError("m must be >= 1")
    a = _rng(seed).uniform(0.0, 1.0, size=(m, n))
    b = 0.75 * a.min(axis=1) + 0.25 * a.max(axis=1)
    return a, b


def attach_budget(inst, kind, slb=DEFAULT_SLB, sub=DEFAULT_SUB):
    """Append a budget row: kind 'budget' adds e'x = 1, 'relaxed' adds
    slb <= e'x <= sub as the inequality pair e'x >= slb, -e'x >= -sub."""
    e = np.ones(inst.n)
    if kind == "budget":
        return inst.with_extra_rows(eq=[(e, 1.0)])
    if kind == "relaxed":
        if not 0 < slb <= sub:
            raise ValueError(f"need 0 < slb <= sub, got ({slb}, {sub})")
        return inst.with_extra_rows(ineq=[(e, slb), (-e, -sub)])
    raise ValueError(f"unknown budget kind {kind!r}")


@dataclass
class SyntheticConfig:
    """Recipe for one synthetic instance; `klass` is one of CLASSES."""

    n: int
    m: int
    klass: str = "S-b"
    seed: int = 0
    slb: float = DEFAULT_SLB
    sub: float = DEFAULT_SUB

    def __post_init__(self):
        if self.klass not in CLASSES:
            raise ValueError(f"unknown class {self.klass!r}; expected one of {CLASSES}")
        if self.m < 1 or self.n < self.m:
            raise ValueError(f"need 1 <= m <= n, got n={self.n}, m={self.m}")


def generate_synthetic(config):
    """Build one synthetic QpInstance from a SyntheticConfig.

    Sub-seeds for Q, c, and the constraint rows are spawned from the config
    seed, so instances are reproducible and the streams are independent.

    Returns (inst, meta) with meta holding the class/seed/shape record used
    for the JSON sidecar.
    """
    ss = np.random.SeedSequence(config.seed)
    s_q, s_c, s_a = ss.spawn(3)
    q = generate_q(config.n, s_q)
    c = generate_linear_cost(config.n, s_c)
    meta = {
        "class": config.klass,
        "n": config.n,
        "m": config.m,
        "seed": config.seed,
    }
    if config.klass.startswith("S"):
        a, b, cmeta = generate_stepwise_constraints(config.n, config.m, s_a)
        meta.update(cmeta)
    else:
        a, b = generate_random_constraints(config.n, config.m, s_a)
    name = f"{config.klass}-n{config.n}-m{config.m}-s{config.seed}"
    inst = QpInstance(q, c, ineq=(a, b), lower=0.0, upper=1.0, name=name)
    if config.klass.endswith("-b"):
        inst = attach_budget(inst, "budget")
    elif config.klass.endswith("-rb"):
        inst = attach_budget(inst, "relaxed", config.slb, config.sub)
        meta["slb"], meta["sub"] = config.slb, config.sub
    inst.name = name
    return inst, meta


@dataclass
class TimeSeriesPanel:
    """Asset return panel: `values` is (n_assets, T), one row per asset."""

    values: np.ndarray
    names: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if np.isnan(self.values).any():
            raise ValueError("panel contains NaN")
        if self.values.shape[1] < 2:
            raise ValueError("need at least 2 periods")
        if not self.names:
            self.names = [f"a{i}" for i in range(self.values.shape[0])]

    @property
    def n_assets(self):
        return self.values.shape[0]

    @property
    def T(self):
        return self.values.shape[1]


def returns_from_prices(panel):
    """Convert a price panel to simple returns p_t/p_{t-1} - 1."""
    v = panel.values
    if (v <= 0).any():
        raise ValueError("prices must be positive")
    return TimeSeriesPanel(v[:, 1:] / v[:, :-1] - 1.0, names=list(panel.names))


def write_panel_csv(panel, path):
    """One row per period, one column per asset, header of asset names."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(panel.names) + "\n")
        for t in range(panel.T):
            fh.write(",".join(f"{v:.17g}" for v in panel.values[:, t]) + "\n")


def read_panel_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    names = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    values = np.asarray(rows, dtype=float).T
    return TimeSeriesPanel(values, names=names)


def build_portfolio(panel, mu, name=None):
    """Minimum-variance portfolio with an expected-return floor.

    min x' Sigma x  s.t.  r'x >= mu,  e'x = 1,  x >= 0

    Sigma is the unbiased (T-1) sample covariance and r the per-asset sample
    mean of the panel.  Infeasibility (mu above every mean) is left to the
    instance validator.
    """
    sigma = np.cov(panel.values)  # rowvar: assets are rows
    sigma = np.atleast_2d(sigma)
    r = panel.values.mean(axis=1)
    n = panel.n_assets
    inst = QpInstance(
        sigma,
        np.zeros(n),
        eq=[(np.ones(n), 1.0)],
        ineq=[(r, float(mu))],
        lower=0.0,
        name=name or f"portfolio-n{n}-mu{mu}",
    )
    return inst


def augment_series(panel, k, eta=DEFAULT_AUGMENT_ETA, seed=0):
    """Clone every asset k times with multiplicative noise U[-eta, eta].

    Output panel has n*(k+1) assets: the originals followed by k noisy copies
    of each (copy blocks in clone order).  eta = 0 duplicates exactly, which
    makes the covariance singular but still PSD.
    """
    if not 1 <= k <= 4:
        raise ValueError("k must be in 1..4")
    rng = _rng(seed)
    blocks = [panel.values]
    names = list(panel.names)
    for j in range(k):
        u = rng.uniform(-eta, eta, size=panel.values.shape)
        blocks.append(panel.values * (1.0 + u))
        names.extend(f"{nm}+{j + 1}" for nm in panel.names)
    return TimeSeriesPanel(np.vstack(blocks), names=names)


def make_random_panel(n, T, seed, mean_lo=0.005, mean_hi=0.012, vol=0.02):
    """Seeded synthetic return panel with asset means spread over a range.

    Each asset's series is recentred so its sample mean is exactly the target
    mean; this makes return-floor feasibility easy to reason about in tests
    (mu <= mean_hi is always attainable).
    """
    rng = _rng(seed)
    means = np.linspace(mean_lo, mean_hi, n)
    values = rng.normal(0.0, vol, size=(n, T))
    values += (means - values.mean(axis=1))[:, None]
    return TimeSeriesPanel(values)
