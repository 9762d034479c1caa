"""Simplicial decomposition solver for convex QPs with few linear constraints.

The package alternates a master QP over the convex hull of generated
extreme points with an LP pricing step over the original polyhedron.
Two master solvers are provided (conjugate-direction and projected
gradient), plus pricing accelerations (sifting, shrinking cuts, early
stopping), instance generators, an independent KKT oracle, and a
benchmark/CLI layer.
"""

from ._simplex_lp import LpError, LpResult, LpUnboundedError, solve_bounded_lp
from .acdm import (AcdmInfo, DirectionSet, MasterSolveError, conjugate_against,
                   exact_line_min, max_feasible_step, simplex_kkt_residual,
                   solve_master_acdm)
from .bench import (BenchRecord, DecayCurve, ProfileCurve, decay_trace,
                    perf_profile, read_records_csv, read_trace_csv, run_bench,
                    write_records_csv, write_trace_csv)
from .fgpm import (FgpmInfo, FgpmParams, armijo_spectral, master_gradient,
                   solve_master_fgpm)
from .instances import (CLASSES, MU_GRID, SyntheticConfig, TimeSeriesPanel,
                        attach_budget, augment_series, build_portfolio,
                        generate_linear_cost, generate_q,
                        generate_random_constraints,
                        generate_stepwise_constraints, generate_synthetic,
                        make_random_panel, read_panel_csv, returns_from_prices,
                        write_panel_csv)
from .master import DuplicateVertexError, MasterState
from .oracle import (KktSolution, OracleBudgetError, OracleError,
                     oracle_simplex_qp, oracle_solve_qp)
from .pricing import (Cut, CutPool, LpProblem, PricingOptions, PricingOutcome,
                      early_eps, lp_solve, price, sifting_solve,
                      vertex_feasibility_error)
from .problem import (DimensionMismatchError, InstanceFormatError, QpInstance,
                      ValidationReport, eval_gradient, eval_objective,
                      min_eigenvalue_estimate, read_instance, validate,
                      write_instance)
from .projection import (HAVE_COMPILED_KERNEL, project_simplex_fast,
                         project_simplex_pure, project_simplex_sort)
from .sd import (PRICING_SETS, SdConfig, SdError, SdResult, SdTrace, TraceRow,
                 add_vertex, drop_vertices, initialize, sd_solve)

__version__ = "0.1.0"

__all__ = [
    "AcdmInfo", "BenchRecord", "CLASSES", "Cut", "CutPool", "DecayCurve",
    "DimensionMismatchError", "DirectionSet", "DuplicateVertexError",
    "FgpmInfo", "FgpmParams", "HAVE_COMPILED_KERNEL", "InstanceFormatError",
    "KktSolution", "LpError", "LpProblem", "LpResult", "LpUnboundedError",
    "MU_GRID", "MasterSolveError", "MasterState", "OracleBudgetError",
    "OracleError", "PRICING_SETS", "PricingOptions", "PricingOutcome",
    "ProfileCurve", "QpInstance", "SdConfig", "SdError", "SdResult",
    "SdTrace", "SyntheticConfig", "TimeSeriesPanel", "TraceRow",
    "ValidationReport", "add_vertex", "armijo_spectral", "attach_budget",
    "augment_series", "build_portfolio", "conjugate_against", "decay_trace",
    "drop_vertices", "early_eps", "eval_gradient", "eval_objective",
    "exact_line_min",
    "generate_linear_cost", "generate_q", "generate_random_constraints",
    "generate_stepwise_constraints", "generate_synthetic", "initialize",
    "lp_solve", "make_random_panel", "master_gradient", "max_feasible_step",
    "min_eigenvalue_estimate", "oracle_simplex_qp", "oracle_solve_qp",
    "perf_profile", "price", "project_simplex_fast", "project_simplex_pure",
    "project_simplex_sort", "read_instance", "read_panel_csv",
    "read_records_csv", "read_trace_csv", "returns_from_prices", "run_bench",
    "sd_solve",
    "sifting_solve", "simplex_kkt_residual", "solve_bounded_lp",
    "solve_master_acdm", "solve_master_fgpm", "validate",
    "vertex_feasibility_error", "write_instance", "write_panel_csv",
    "write_records_csv", "write_trace_csv",
]
