"""Dense convex QP model, objective/gradient evaluation, validation, file I/O.

The problem solved throughout the package is

    min  f(x) = x'Qx + c'x
    s.t. a_i'x  = b_i   (equality rows)
         a_i'x >= b_i   (inequality rows)
         l <= x <= u    (optional simple bounds)

with Q symmetric positive semidefinite and a feasible region that is nonempty
and bounded.  Note the objective carries no 1/2 factor, so the gradient is
2Qx + c.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

# eigenvalue probe slack, relative to ||Q||
PSD_TOL = 1e-8
FILE_MAGIC = "QPTXT1"


class DimensionMismatchError(ValueError):
    pass


class InstanceFormatError(ValueError):
    """Raised on malformed instance files; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _as_matrix(rows, n):
    if rows is None:
        return np.zeros((0, n)), np.zeros(0)
    if isinstance(rows, tuple):
        a, b = rows
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return a, np.asarray(b, dtype=float).ravel()
    a = np.asarray([np.asarray(r[0], dtype=float) for r in rows], dtype=float)
    b = np.asarray([float(r[1]) for r in rows], dtype=float)
    if a.size == 0:
        return np.zeros((0, n)), np.zeros(0)
    return a.reshape(len(rows), n), b


@dataclass
class QpInstance:
    """Immutable dense QP instance.

    Parameters
    ----------
    Q : (n, n) array
        Quadratic form; symmetrized on construction.
    c : (n,) array
        Linear cost.
    eq, ineq : list of (a, b) pairs or (A, b) tuple, optional
        General equality rows a'x = b and inequality rows a'x >= b.
    lower, upper : (n,) arrays, optional
        Simple bounds; ``None`` means unbounded on that side.
    """

    Q: np.ndarray
    c: np.ndarray
    eq: object = None
    ineq: object = None
    lower: object = None
    upper: object = None
    name: str = "qp"
    A_eq: np.ndarray = field(init=False, repr=False)
    b_eq: np.ndarray = field(init=False, repr=False)
    A_in: np.ndarray = field(init=False, repr=False)
    b_in: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        if self.Q.ndim != 2 or self.Q.shape[0] != self.Q.shape[1]:
            raise DimensionMismatchError(f"Q must be square, got {self.Q.shape}")
        n = self.Q.shape[0]
        self.Q = 0.5 * (self.Q + self.Q.T)
        self.c = np.asarray(self.c, dtype=float).ravel()
        if self.c.size != n:
            raise DimensionMismatchError(f"c has size {self.c.size}, expected {n}")
        self.A_eq, self.b_eq = _as_matrix(self.eq, n)
        self.A_in, self.b_in = _as_matrix(self.ineq, n)
        for mat, tag in ((self.A_eq, "eq"), (self.A_in, "ineq")):
            if mat.shape[1] != n:
                raise DimensionMismatchError(f"{tag} rows have {mat.shape[1]} columns, expected {n}")
        if self.lower is not None:
            self.lower = np.asarray(self.lower, dtype=float).ravel()
            if self.lower.size == 1:
                self.lower = np.full(n, self.lower.item())
            if self.lower.size != n:
                raise DimensionMismatchError("lower bound size mismatch")
        if self.upper is not None:
            self.upper = np.asarray(self.upper, dtype=float).ravel()
            if self.upper.size == 1:
                self.upper = np.full(n, self.upper.item())
            if self.upper.size != n:
                raise DimensionMismatchError("upper bound size mismatch")
        for arr in (self.Q, self.c, self.A_eq, self.b_eq, self.A_in, self.b_in,
                    self.lower, self.upper):
            if arr is not None:
                arr.setflags(write=False)
        self.eq = None
        self.ineq = None

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def n_eq(self):
        return self.A_eq.shape[0]

    @property
    def n_ineq(self):
        return self.A_in.shape[0]

    def bounds_arrays(self):
        """Bounds as dense arrays with +-inf for missing sides."""
        lo = self.lower if self.lower is not None else np.full(self.n, -np.inf)
        hi = self.upper if self.upper is not None else np.full(self.n, np.inf)
        return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)

    def with_extra_rows(self, eq=None, ineq=None, name=None):
        """New instance with appended constraint rows (used by budget helpers)."""
        A_eq, b_eq = self.A_eq, self.b_eq
        A_in, b_in = self.A_in, self.b_in
        if eq is not None:
            a, b = _as_matrix(eq, self.n)
            A_eq = np.vstack([A_eq, a])
            b_eq = np.concatenate([b_eq, b])
        if ineq is not None:
            a, b = _as_matrix(ineq, self.n)
            A_in = np.vstack([A_in, a])
            b_in = np.concatenate([b_in, b])
        return QpInstance(self.Q, self.c, (A_eq, b_eq), (A_in, b_in),
                          self.lower, self.upper, name or self.name)


def eval_objective(inst, x):
    """f(x) = x'Qx + c'x."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != inst.n:
        raise DimensionMismatchError(f"x has size {x.size}, expected {inst.n}")
    return float(x @ inst.Q @ x + inst.c @ x)


def eval_gradient(inst, x):
    """grad f(x) = 2Qx + c."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != inst.n:
        raise DimensionMismatchError(f"x has size {x.size}, expected {inst.n}")
    return 2.0 * (inst.Q @ x) + inst.c


def min_eigenvalue_estimate(Q, iters=80, seed=0):
    """Smallest-eigenvalue probe via two power iterations (no factorization).

    First estimates the dominant eigenvalue mu, then runs power iteration on
    mu*I - Q; the probe is cheap (O(n^2) per step) and accurate enough for a
    PSD check with a relative tolerance.
    """
    n = Q.shape[0]
    if n == 1:
        return float(Q[0, 0])
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = Q @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    mu = abs(float(v @ (Q @ v)))
    if mu == 0.0:
        return 0.0
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = mu * v - Q @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            break
        v = w / nw
    return float(v @ (Q @ v))


@dataclass
class ValidationReport:
    symmetric: bool
    psd: bool
    min_eig_estimate: float
    feasible: bool
    bounded: bool
    messages: list

    @property
    def ok(self):
        return self.symmetric and self.psd and self.feasible and self.bounded


def validate(inst, eig_iters=80):
    """Check the standing assumptions: Q symmetric PSD, X nonempty and bounded.

    Report-only; never raises.  Feasibility and boundedness are probed with
    two LPs (min and max of e'x over X).
    """
    messages = []
    asym = float(np.max(np.abs(inst.Q - inst.Q.T))) if inst.n else 0.0
    symmetric = asym == 0.0
    if not symmetric:
        messages.append(f"Q asymmetry {asym:.3e}")

    scale = float(np.linalg.norm(inst.Q, np.inf))
    min_eig = min_eigenvalue_estimate(inst.Q, iters=eig_iters)
    psd = min_eig >= -PSD_TOL * max(scale, 1.0)
    if not psd:
        messages.append(f"indefinite: eigenvalue probe {min_eig:.3e}")

    lo, hi = inst.bounds_arrays()
    bounds = list(zip([v if np.isfinite(v) else None for v in lo],
                      [v if np.isfinite(v) else None for v in hi]))
    kw = dict(
        A_ub=-inst.A_in if inst.n_ineq else None,
        b_ub=-inst.b_in if inst.n_ineq else None,
        A_eq=inst.A_eq if inst.n_eq else None,
        b_eq=inst.b_eq if inst.n_eq else None,
        bounds=bounds,
        method="highs",
    )
    e = np.ones(inst.n)
    res_lo = linprog(e, **kw)
    res_hi = linprog(-e, **kw)
    feasible = res_lo.status not in (2,) and res_hi.status not in (2,)
    bounded = feasible and res_lo.status == 0 and res_hi.status == 0
    if not feasible:
        messages.append("feasible region empty")
    elif not bounded:
        messages.append("feasible region unbounded")
    return ValidationReport(symmetric, psd, float(min_eig), feasible, bounded, messages)


def _fmt(v):
    return f"{v:.17g}"


def _fmt_row(values):
    return " ".join(_fmt(v) for v in values)


def write_instance(inst, path):
    """Write in the QPTXT1 plain-text format (17 significant digits)."""
    has_bounds = int(inst.lower is not None or inst.upper is not None)
    lo, hi = inst.bounds_arrays()
    lines = [f"{FILE_MAGIC} n {inst.n} eq {inst.n_eq} ineq {inst.n_ineq} bounds {has_bounds}"]
    for row in inst.Q:
        lines.append(_fmt_row(row))
    lines.append(_fmt_row(inst.c))
    for a, b in zip(inst.A_eq, inst.b_eq):
        lines.append(_fmt_row(np.append(a, b)))
    for a, b in zip(inst.A_in, inst.b_in):
        lines.append(_fmt_row(np.append(a, b)))
    if has_bounds:
        lines.append(_fmt_row(lo))
        lines.append(_fmt_row(hi))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_instance(path):
    """Parse a QPTXT1 file; raises InstanceFormatError with a line number."""
    with open(path, encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise InstanceFormatError("empty file", line=1)
    head = raw[0].split()
    if len(head) != 9 or head[0] != FILE_MAGIC or head[1::2] != ["n", "eq", "ineq", "bounds"]:
        raise InstanceFormatError(f"bad header {raw[0]!r}", line=1)
    try:
        n, n_eq, n_in, has_bounds = (int(v) for v in head[2::2])
    except ValueError as exc:
        raise InstanceFormatError(str(exc), line=1) from None

    pos = 1

    def take(count, width, what):
        nonlocal pos
        out = []
        for _ in range(count):
            if pos >= len(raw):
                raise InstanceFormatError(f"truncated file: missing {what}", line=pos + 1)
            parts = raw[pos].split()
            if len(parts) != width:
                raise InstanceFormatError(
                    f"{what}: expected {width} numbers, got {len(parts)}", line=pos + 1)
            try:
                out.append([float(p) for p in parts])
            except ValueError:
                raise InstanceFormatError(f"{what}: bad number", line=pos + 1) from None
            pos += 1
        return np.asarray(out, dtype=float)

    Q = take(n, n, "Q row")
    c = take(1, n, "c row")[0]
    eq = take(n_eq, n + 1, "equality row")
    ineq = take(n_in, n + 1, "inequality row")
    lower = upper = None
    if has_bounds:
        lower = take(1, n, "lower bound row")[0]
        upper = take(1, n, "upper bound row")[0]
    name = path if isinstance(path, str) else str(path)
    return QpInstance(
        Q, c,
        (eq[:, :n], eq[:, n]) if n_eq else None,
        (ineq[:, :n], ineq[:, n]) if n_in else None,
        lower, upper, name=name)
