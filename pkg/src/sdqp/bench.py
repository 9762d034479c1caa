"""Benchmark harness: batch solver runs, telemetry CSV, profiles, decay curves.

Conventions used throughout:

* ``Er`` is the relative objective error ``|f - f_ref| / (1 + |f_ref|)``
  against the per-instance reference value; ``Ei`` is the l-inf distance
  between the two solutions.  Both are undefined (``None``, an empty CSV
  cell) unless both runs finished with status ``optimal``.
* The reference value comes from the independent KKT oracle when the
  instance is small enough, otherwise from a tight-tolerance exact-pricing
  run (``acdm/D`` at tol 1e-9 by default).
* Floats are written to CSV with ``repr`` so re-parsing reproduces the
  in-memory records exactly.
"""

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .instances import SyntheticConfig, build_portfolio, generate_synthetic, \
    make_random_panel
from .oracle import OracleError, oracle_solve_qp
from .problem import read_instance
from .sd import SdConfig, TraceRow, sd_solve

REFERENCE_LABEL = "acdm/D"
REFERENCE_TOL = 1e-9
ORACLE_N_CAP = 50  # above this the reference run replaces the oracle
DEFAULT_PANEL_T = 252


@dataclass
class BenchRecord:
    """One benchmark run: a solver configuration applied to one instance.

    ``f``/``er``/``ei`` are None when the run (or the reference) failed.
    Time-split fields mirror the solver trace and sum to at most the wall
    time (plus bookkeeping noise).
    """

    instance: str
    klass: str
    n: int
    m: int
    config: str
    status: str
    t_wall: float
    f: float = None
    er: float = None
    ei: float = None
    iterations: int = 0
    master_dim: int = 0
    t_preprocessing: float = 0.0
    t_master: float = 0.0
    t_pricing: float = 0.0
    t_updating: float = 0.0


_COLUMNS = (
    ("instance", str), ("klass", str), ("n", int), ("m", int),
    ("config", str), ("status", str), ("t_wall", float), ("f", float),
    ("er", float), ("ei", float), ("iterations", int), ("master_dim", int),
    ("t_preprocessing", float), ("t_master", float), ("t_pricing", float),
    ("t_updating", float),
)


def _fmt_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records, path):
    """Write BenchRecords as CSV; floats round-trip exactly via repr."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(name for name, _ in _COLUMNS)
        for rec in records:
            w.writerow(_fmt_cell(getattr(rec, name)) for name, _ in _COLUMNS)


def read_records_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = tuple(rows[0])
    expected = tuple(name for name, _ in _COLUMNS)
    if header != expected:
        raise ValueError(f"unexpected CSV header {header!r}")
    records = []
    for row in rows[1:]:
        kw = {}
        for (name, typ), cell in zip(_COLUMNS, row):
            kw[name] = None if cell == "" and typ is float else typ(cell)
        records.append(BenchRecord(**kw))
    return records


def write_trace_csv(trace, path):
    """Persist SD trace rows (one line per outer iteration)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "f", "pricing_value", "master_dim", "t",
                    "pricing_status", "early_eps", "pivots"])
        for row in trace.rows:
            w.writerow([row.iteration, repr(row.f), repr(row.pricing_value),
                        row.master_dim, repr(row.t), row.pricing_status,
                        repr(row.early_eps), row.pivots])


def read_trace_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    out = []
    for row in rows[1:]:
        out.append(TraceRow(int(row[0]), float(row[1]), float(row[2]),
                            int(row[3]), float(row[4]), row[5],
                            float(row[6]), int(row[7])))
    return out


# ---------------------------------------------------------------------------
# batch runner


def _entry_name(entry):
    """Stable instance id for a manifest entry; needs no file access."""
    if isinstance(entry, str):
        name = os.path.basename(entry)
        return name[:-3] if name.endswith(".qp") else name
    seed = int(os.environ.get("SDQP_SEED", entry.get("seed", 0)))
    klass = entry.get("class", "S-b")
    if klass == "portfolio":
        return f"portfolio-n{entry.get('n', 50)}-s{seed}"
    return f"{klass}-n{entry['n']}-m{entry['m']}-s{seed}"


def _load_entry(entry):
    """Resolve a manifest entry (file path or generator spec) to an instance.

    SDQP_SEED in the environment overrides the seed of generator specs.
    Returns (instance, class_tag); the tag is "" when unknown.
    """
    if isinstance(entry, str):
        klass = ""
        sidecar = entry + ".json"
        if os.path.exists(sidecar):
            with open(sidecar, encoding="utf-8") as fh:
                klass = json.load(fh).get("class", "")
        return read_instance(entry), klass
    spec = dict(entry)
    klass = spec.get("class", "S-b")
    seed = int(os.environ.get("SDQP_SEED", spec.get("seed", 0)))
    if klass == "portfolio":
        panel = make_random_panel(int(spec.get("n", 50)),
                                  int(spec.get("T", DEFAULT_PANEL_T)), seed)
        inst = build_portfolio(panel, float(spec.get("mu", 0.008)))
    else:
        cfg = SyntheticConfig(n=int(spec["n"]), m=int(spec["m"]), klass=klass,
                              seed=seed)
        inst, _ = generate_synthetic(cfg)
    return inst, klass


def _run_job(job):
    """Worker body: solve one (entry, label) pair; never raises."""
    entry, name, label, tol, time_limit = job
    try:
        inst, klass = _load_entry(entry)
    except Exception as exc:  # missing file, bad format, bad spec
        return {"instance": name, "klass": "", "n": 0, "m": 0, "config": label,
                "status": "error", "t_wall": 0.0, "error": str(exc)}
    payload = {"instance": name, "klass": klass, "n": inst.n,
               "m": inst.n_eq + inst.n_ineq, "config": label}
    t0 = time.perf_counter()
    try:
        cfg = SdConfig.from_label(label, tol_sd=tol, time_limit_s=time_limit)
        res = sd_solve(inst, cfg)
    except Exception as exc:
        payload.update(status="error", t_wall=time.perf_counter() - t0,
                       error=str(exc))
        return payload
    payload.update(
        status=res.status, t_wall=time.perf_counter() - t0, f=res.f,
        x=np.asarray(res.x), iterations=res.iterations,
        master_dim=res.master_dim,
        times={k: float(v) for k, v in res.trace.times.items()})
    return payload


def _reference_values(entries, payloads, reference_label, reference_tol,
                      oracle_n_cap):
    """Per-instance (f_ref, x_ref) pairs, or None when unavailable."""
    by_key = {}
    for p in payloads:
        by_key.setdefault(p["instance"], []).append(p)
    refs = {}
    for entry in entries:
        name = _entry_name(entry)
        if name in refs:
            continue
        plist = by_key.get(name, [])
        loaded = [p for p in plist if p["n"] > 0]
        if not loaded:
            refs[name] = None  # instance never loaded; errors stay bare
            continue
        if loaded[0]["n"] <= oracle_n_cap:
            try:
                inst, _ = _load_entry(entry)
                sol = oracle_solve_qp(inst)
                refs[name] = (sol.f, np.asarray(sol.x))
                continue
            except OracleError:
                pass  # fall back to the reference run
        match = next((p for p in plist
                      if p["config"] == reference_label
                      and p.get("tol") == reference_tol
                      and p["status"] == "optimal"), None)
        if match is None:
            match = _run_job((entry, name, reference_label, reference_tol,
                              math.inf))
        if match["status"] == "optimal":
            refs[name] = (match["f"], match["x"])
        else:
            refs[name] = None
    return refs


def run_bench(manifest, jobs=1):
    """Run every (instance, config) pair of a manifest; return BenchRecords.

    The manifest is a mapping with keys

    ==============  =====================================================
    instances       list of QPTXT1 paths or generator specs, e.g.
                    {"class": "S-b", "n": 100, "m": 22, "seed": 3}
    configs         solver labels like "acdm/Sif-E" or "fgpm/D"
    tol             SD stopping tolerance (default 1e-6)
    time_limit      per-run limit in seconds (default 1000)
    reference       reference config label (default "acdm/D")
    reference_tol   its tolerance (default 1e-9)
    oracle_n_cap    largest n checked against the oracle (default 50)
    ==============  =====================================================

    Missing or unreadable instances produce rows with status ``error`` and
    the run continues.  Jobs run in a process pool when ``jobs > 1``;
    results merge deterministically by (instance, config).
    """
    entries = list(manifest["instances"])
    labels = list(manifest["configs"])
    tol = float(manifest.get("tol", 1e-6))
    time_limit = float(manifest.get("time_limit", 1000.0))
    ref_label = manifest.get("reference", REFERENCE_LABEL)
    ref_tol = float(manifest.get("reference_tol", REFERENCE_TOL))
    oracle_cap = int(manifest.get("oracle_n_cap", ORACLE_N_CAP))

    joblist = [(entry, _entry_name(entry), label, tol, time_limit)
               for entry in entries for label in labels]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            payloads = list(pool.map(_run_job, joblist))
    else:
        payloads = [_run_job(job) for job in joblist]
    for payload in payloads:
        payload["tol"] = tol

    refs = _reference_values(entries, payloads, ref_label, ref_tol, oracle_cap)

    records = []
    for payload in payloads:
        rec = BenchRecord(
            instance=payload["instance"], klass=payload["klass"],
            n=payload["n"], m=payload["m"], config=payload["config"],
            status=payload["status"], t_wall=payload["t_wall"],
            f=payload.get("f"), iterations=payload.get("iterations", 0),
            master_dim=payload.get("master_dim", 0))
        times = payload.get("times", {})
        rec.t_preprocessing = times.get("preprocessing", 0.0)
        rec.t_master = times.get("master", 0.0)
        rec.t_pricing = times.get("pricing", 0.0)
        rec.t_updating = times.get("updating", 0.0)
        ref = refs.get(payload["instance"])
        if ref is not None and payload["status"] == "optimal":
            f_ref, x_ref = ref
            rec.er = abs(payload["f"] - f_ref) / (1.0 + abs(f_ref))
            rec.ei = float(np.max(np.abs(payload["x"] - x_ref)))
        records.append(rec)
    return records


# ---------------------------------------------------------------------------
# performance profiles


class ProfileCurve:
    """One solver's cumulative distribution of time ratios (Dolan-More).

    ``ratios`` holds r_p = t_p / min_s t_p per instance, sorted ascending,
    with inf marking instances the solver failed on.
    """

    def __init__(self, label, ratios):
        self.label = label
        self.ratios = np.sort(np.asarray(ratios, dtype=float))
        if self.ratios.size == 0:
            raise ValueError("profile needs at least one instance")

    def rho(self, tau):
        """Fraction of instances with ratio <= tau (step function)."""
        return np.searchsorted(self.ratios, tau, side="right") / self.ratios.size

    def steps(self):
        """(tau, rho) knots of the step function, for plotting."""
        finite = self.ratios[np.isfinite(self.ratios)]
        taus = np.unique(np.concatenate([[1.0], finite]))
        return taus, np.array([self.rho(t) for t in taus])


def perf_profile(records, solvers):
    """Dolan-More performance profiles over the shared instance set.

    Only instances present for every requested solver are used; failed
    runs (status other than ``optimal``) get ratio inf.  Raises ValueError
    if the shared set is empty or a solver has no records.
    """
    by_solver = {}
    for rec in records:
        if rec.config in solvers:
            by_solver.setdefault(rec.config, {})[rec.instance] = rec
    missing = [s for s in solvers if s not in by_solver]
    if missing:
        raise ValueError(f"no records for solvers {missing}")
    shared = set.intersection(*(set(v) for v in by_solver.values()))
    if not shared:
        raise ValueError("no instance was run by every requested solver")
    shared = sorted(shared)

    times = np.full((len(shared), len(solvers)), np.inf)
    for j, s in enumerate(solvers):
        for i, inst in enumerate(shared):
            rec = by_solver[s][inst]
            if rec.status == "optimal":
                times[i, j] = rec.t_wall
    best = times.min(axis=1)
    ratios = np.where(np.isfinite(times) & np.isfinite(best)[:, None],
                      times / np.where(best > 0, best, 1.0)[:, None], np.inf)
    # zero-time ties (clock resolution) count as ratio 1
    ratios[np.isfinite(times) & (best == 0.0)[:, None]] = 1.0
    return [ProfileCurve(s, ratios[:, j]) for j, s in enumerate(solvers)]


def write_profile_csv(curves, path):
    """Tabulate all curves on the union of their knots (gnuplot-ready)."""
    taus = np.unique(np.concatenate([c.steps()[0] for c in curves]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["tau"] + [c.label for c in curves])
        for t in taus:
            w.writerow([repr(float(t))] + [repr(float(c.rho(t))) for c in curves])


# ---------------------------------------------------------------------------
# objective-decay curves


@dataclass
class DecayCurve:
    """Averaged objective ratio f/f_ref against time ratio t/T_ref."""

    label: str
    time_ratio: np.ndarray
    objective_ratio: np.ndarray


def _step_sample(t, f, grid):
    """Hold-last-value interpolation of (t, f) samples onto grid points."""
    idx = np.searchsorted(t, grid, side="right") - 1
    return f[np.clip(idx, 0, len(f) - 1)]


def decay_trace(traces, reference_times, reference_values, max_ratio=2.0,
                grid_points=201, min_ref_time=0.0):
    """Average objective-decay curves normalized by a reference solver.

    Parameters
    ----------
    traces : mapping label -> mapping instance -> sequence of (t, f) pairs
    reference_times, reference_values : mapping instance -> float
        Total time and final objective of the reference solver.
    max_ratio : float
        Curves are reported for time ratios in [0, max_ratio].
    min_ref_time : float
        Instances whose reference time is below this are skipped (the
        long-run study uses 10 s).

    Raises ValueError when an instance lacks reference data.
    """
    grid = np.linspace(0.0, max_ratio, grid_points)
    curves = []
    for label in sorted(traces):
        per_instance = []
        for inst_name in sorted(traces[label]):
            if inst_name not in reference_times or inst_name not in reference_values:
                raise ValueError(f"missing reference data for {inst_name!r}")
            t_ref = reference_times[inst_name]
            f_ref = reference_values[inst_name]
            if t_ref < min_ref_time:
                continue
            if t_ref <= 0 or f_ref == 0:
                raise ValueError(f"degenerate reference for {inst_name!r}")
            rows = np.asarray([(t, f) for t, f in traces[label][inst_name]],
                              dtype=float)
            order = np.argsort(rows[:, 0])
            t = rows[order, 0] / t_ref
            f = rows[order, 1] / f_ref
            per_instance.append(_step_sample(t, f, grid))
        if not per_instance:
            continue
        curves.append(DecayCurve(label, grid.copy(),
                                 np.mean(per_instance, axis=0)))
    if not curves:
        raise ValueError("no traces survived the reference-time filter")
    return curves


def write_decay_csv(curves, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time_ratio"] + [c.label for c in curves])
        grid = curves[0].time_ratio
        for i in range(len(grid)):
            w.writerow([repr(float(grid[i]))]
                       + [repr(float(c.objective_ratio[i])) for c in curves])
