"""Unit-commitment formulation toolkit.

Builds mixed-integer formulations of the single-bus unit-commitment
problem in several equivalent shapes (classic three-binary models and
interval-indexed models over sliding windows), solves them through
scipy's HiGHS bindings or an external solver, and provides an exact
rational lab for inspecting small commitment polytopes.
"""

from .instance import (
    UCFError,
    ParseError,
    ValidationError,
    UnitParams,
    NormalizedUnit,
    StatusBounds,
    SystemSeries,
    UCInstance,
    load_instance,
    normalize_unit,
    status_bounds,
    warm_start_flag,
)
from .expr import LinExpr, Variable, Row, Formulation
from .windows import IntervalSet, Interval, feasible_intervals, count_model_size
from .builder import (
    MODEL_KINDS,
    default_window,
    build_formulation,
    piecewise_linearize,
    EliminationSystem,
    elimination_solve,
)
from .bounds import FacetQuery, facet_predicate, redundancy_ratio
from .solver import (
    SolverConfig,
    SolverError,
    LpSolution,
    MipSolution,
    solve_lp,
    solve_mip,
    metrics,
    write_mps,
    run_external,
)
from .polylab import (
    POLYTOPE_SPECS,
    GuardError,
    Polytope,
    PolyRow,
    FacetReport,
    build_polytope,
    enumerate_vertices,
    polytope_dim,
    verify_facet,
    verify_integral_hull,
    facet_report_lines,
)
from .witness import FAMILY_IDS, witness_points, tight_assembly
from .cli import (
    BenchRecord,
    bench_run,
    bench_csv,
    parse_bench_csv,
    generate_synthetic,
    performance_profile,
)

__version__ = "0.1.0"

__all__ = [
    "UCFError",
    "ParseError",
    "ValidationError",
    "UnitParams",
    "NormalizedUnit",
    "StatusBounds",
    "SystemSeries",
    "UCInstance",
    "load_instance",
    "normalize_unit",
    "status_bounds",
    "warm_start_flag",
    "LinExpr",
    "Variable",
    "Row",
    "Formulation",
    "IntervalSet",
    "Interval",
    "feasible_intervals",
    "count_model_size",
    "MODEL_KINDS",
    "default_window",
    "build_formulation",
    "piecewise_linearize",
    "EliminationSystem",
    "elimination_solve",
    "FacetQuery",
    "facet_predicate",
    "redundancy_ratio",
    "SolverConfig",
    "SolverError",
    "LpSolution",
    "MipSolution",
    "solve_lp",
    "solve_mip",
    "metrics",
    "write_mps",
    "run_external",
    "POLYTOPE_SPECS",
    "GuardError",
    "Polytope",
    "PolyRow",
    "FacetReport",
    "build_polytope",
    "enumerate_vertices",
    "polytope_dim",
    "verify_facet",
    "verify_integral_hull",
    "facet_report_lines",
    "FAMILY_IDS",
    "witness_points",
    "tight_assembly",
    "BenchRecord",
    "bench_run",
    "bench_csv",
    "parse_bench_csv",
    "generate_synthetic",
    "performance_profile",
    "__version__",
]
