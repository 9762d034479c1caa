"""Command-line front end: generate instances, solve, benchmark, post-process.

Subcommands
-----------
generate   write one instance (QPTXT1 + JSON metadata sidecar) to a directory
solve      run one solver configuration on one instance file
bench      run a manifest of instance x config jobs, emit a results CSV
profile    compute Dolan-More performance profiles from a results CSV
decay      average objective-decay curves from a directory of trace CSVs

Exit codes: 0 = all runs solved, 2 = some run hit an iteration/time limit,
1 = error.  The SDQP_SEED environment variable overrides seeds of generator
specs inside a bench manifest.

Trace files consumed by ``decay`` are named
``<instance>__<master>-<pricing>.trace.csv`` (as documented for ``solve
--trace``); the label ``acdm/Sif-E`` becomes the file stem suffix
``acdm-Sif-E``.
"""

import argparse
import json
import os
import sys

from .bench import (decay_trace, perf_profile, read_records_csv,
                    read_trace_csv, run_bench, write_decay_csv,
                    write_profile_csv, write_records_csv, write_trace_csv)
from .instances import (CLASSES, SyntheticConfig, build_portfolio,
                        generate_synthetic, make_random_panel)
from .problem import read_instance, validate, write_instance
from .sd import SdConfig, sd_solve

GENERATE_CLASSES = CLASSES + ("portfolio",)


def _parse_m(value, n):
    """Row count given directly ("22") or as a fraction of n ("n/8")."""
    text = str(value).strip()
    if "/" in text:
        num, _, den = text.partition("/")
        if num.strip() != "n":
            raise ValueError(f"fractional m must look like n/8, got {value!r}")
        return max(1, n // int(den))
    return int(text)


def _cmd_generate(args):
    n = args.n
    os.makedirs(args.out, exist_ok=True)
    if args.klass == "portfolio":
        seed = args.seed
        panel = make_random_panel(n, args.periods, seed)
        name = f"portfolio-n{n}-s{seed}"
        inst = build_portfolio(panel, args.mu, name=name)
        meta = {"class": "portfolio", "n": n, "m": inst.n_eq + inst.n_ineq,
                "seed": seed, "mu": args.mu, "periods": args.periods}
    else:
        if args.m is None:
            raise ValueError("--m is required for synthetic classes")
        m = _parse_m(args.m, n)
        cfg = SyntheticConfig(n=n, m=m, klass=args.klass, seed=args.seed)
        inst, meta = generate_synthetic(cfg)
        name = inst.name
    path = os.path.join(args.out, name + ".qp")
    write_instance(inst, path)
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1)
    print(path)
    return 0


def _cmd_solve(args):
    inst = read_instance(args.instance)
    if args.validate:
        report = validate(inst)
        if not report.ok:
            print(f"invalid instance: {report.messages}", file=sys.stderr)
            return 1
    cfg = SdConfig(master=args.master,
                   use_sifting=args.pricing == "sifting",
                   use_cuts=args.cuts, early_stop=args.early_stop,
                   tol_sd=args.tol, time_limit_s=args.time_limit)
    res = sd_solve(inst, cfg)
    if args.trace:
        write_trace_csv(res.trace, args.trace)
    print(f"instance   {inst.name}")
    print(f"config     {res.label}")
    print(f"status     {res.status}")
    print(f"objective  {res.f:.12e}")
    print(f"iterations {res.iterations}")
    print(f"master dim {res.master_dim}")
    t = res.trace.times
    print("time split " + "  ".join(f"{k}={v:.3f}s" for k, v in t.items()))
    return 0 if res.solved else 2


def _cmd_bench(args):
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    records = run_bench(manifest, jobs=args.jobs)
    write_records_csv(records, args.out)
    n_err = sum(r.status == "error" for r in records)
    n_limit = sum(r.status in ("time_limit", "iter_limit") for r in records)
    n_ok = sum(r.status == "optimal" for r in records)
    print(f"{len(records)} runs: {n_ok} solved, {n_limit} limit-hit, "
          f"{n_err} errors -> {args.out}")
    if n_err:
        return 1
    return 2 if n_limit else 0


def _cmd_profile(args):
    records = read_records_csv(args.inp)
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    curves = perf_profile(records, solvers)
    write_profile_csv(curves, args.out)
    for c in curves:
        taus, _ = c.steps()
        print(f"{c.label}: rho(1)={c.rho(1.0):.3f} "
              f"solved={c.rho(float(taus[-1])):.3f}")
    return 0


def _label_from_stem(stem):
    """Recover "acdm/Sif-E" from the file-name suffix "acdm-Sif-E"."""
    master, _, pricing = stem.partition("-")
    return f"{master}/{pricing}" if pricing else master


def _cmd_decay(args):
    traces = {}
    for fname in sorted(os.listdir(args.inp)):
        if not fname.endswith(".trace.csv"):
            continue
        stem = fname[: -len(".trace.csv")]
        inst_name, sep, label_part = stem.rpartition("__")
        if not sep:
            continue
        label = _label_from_stem(label_part)
        rows = read_trace_csv(os.path.join(args.inp, fname))
        traces.setdefault(label, {})[inst_name] = [(r.t, r.f) for r in rows]
    if args.reference not in traces:
        print(f"no traces found for reference {args.reference!r}",
              file=sys.stderr)
        return 1
    ref = traces[args.reference]
    ref_times = {k: rows[-1][0] for k, rows in ref.items()}
    ref_values = {k: rows[-1][1] for k, rows in ref.items()}
    curves = decay_trace(traces, ref_times, ref_values,
                         min_ref_time=args.min_time)
    write_decay_csv(curves, args.out)
    print(f"{len(curves)} curves over {len(ref)} instances -> {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="sdqp",
        description="Simplicial decomposition QP solver and benchmark tools")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic instance")
    g.add_argument("--class", dest="klass", required=True,
                   choices=GENERATE_CLASSES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", default=None,
                   help="row count, either an integer or a fraction like n/8")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mu", type=float, default=0.008,
                   help="portfolio return floor")
    g.add_argument("--periods", type=int, default=252,
                   help="portfolio panel length")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("--instance", required=True)
    s.add_argument("--master", choices=("acdm", "fgpm"), default="acdm")
    s.add_argument("--pricing", choices=("default", "sifting"),
                   default="default")
    s.add_argument("--early-stop", action="store_true")
    s.add_argument("--cuts", action="store_true")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--time-limit", type=float, default=1000.0)
    s.add_argument("--trace", default=None, help="write the trace CSV here")
    s.add_argument("--validate", action="store_true",
                   help="check convexity/boundedness before solving")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="run a benchmark manifest")
    b.add_argument("--manifest", required=True)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", default="results.csv")
    b.set_defaults(func=_cmd_bench)

    pr = sub.add_parser("profile", help="performance profiles from results")
    pr.add_argument("--in", dest="inp", required=True)
    pr.add_argument("--solvers", required=True,
                    help="comma-separated config labels")
    pr.add_argument("--out", default="profile.csv")
    pr.set_defaults(func=_cmd_profile)

    d = sub.add_parser("decay", help="objective-decay curves from traces")
    d.add_argument("--in", dest="inp", required=True,
                   help="directory of *.trace.csv files")
    d.add_argument("--reference", required=True,
                   help="label whose time/objective normalize the curves")
    d.add_argument("--min-time", type=float, default=0.0,
                   help="skip instances the reference solved faster than this")
    d.add_argument("--out", default="decay.csv")
    d.set_defaults(func=_cmd_decay)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
