"""Desk-scale solving: LP relaxations and MILPs through scipy's HiGHS
bindings, a deterministic free-format MPS writer, a bridge to any external
solver that reads MPS, and the solution metrics used by the benchmark
driver.
"""

from __future__ import annotations

import math
import os
import shlex
import subprocess
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .expr import Formulation
from .instance import UCFError


class SolverError(UCFError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and limits; external_cmd is a command template with
    {mps} and {sol} placeholders (UCF_SOLVER_CMD supplies a default)."""

    feas_tol: float = 1e-7
    opt_tol: float = 1e-7
    int_tol: float = 1e-6
    node_limit: int | None = None
    time_limit: float | None = None
    mip_gap: float = 1e-3
    external_cmd: str | None = None

    def __post_init__(self):
        for name in ("feas_tol", "opt_tol", "int_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    objective: float
    values: dict


@dataclass(frozen=True)
class MipSolution:
    status: str  # optimal | limit | infeasible | unbounded
    objective: float  # incumbent
    bound: float
    gap: float
    nodes: int
    values: dict


def _matrixify(f: Formulation):
    ids = list(f.variables)
    index = {vid: j for j, vid in enumerate(ids)}
    n = len(ids)
    c = np.zeros(n)
    for vid, co in f.objective.terms.items():
        c[index[vid]] += co
    m = len(f.rows)
    data, ri, ci = [], [], []
    lb = np.empty(m)
    ub = np.empty(m)
    for i, r in enumerate(f.rows):
        for vid, co in r.expr.terms.items():
            ri.append(i)
            ci.append(index[vid])
            data.append(co)
        if r.sense == "<=":
            lb[i], ub[i] = -np.inf, r.rhs
        elif r.sense == ">=":
            lb[i], ub[i] = r.rhs, np.inf
        else:
            lb[i] = ub[i] = r.rhs
    A = sparse.csr_matrix((data, (ri, ci)), shape=(m, n))
    vlo = np.array([f.variables[v].lower for v in ids])
    vhi = np.array([f.variables[v].upper for v in ids])
    integ = np.array([1 if f.variables[v].integral else 0 for v in ids])
    return ids, c, A, lb, ub, vlo, vhi, integ


def _check_linear(f: Formulation):
    if f.quad_objective:
        raise SolverError(
            "objective has quadratic terms; piecewise-linearize first")


def _options(cfg: SolverConfig, mip: bool) -> dict:
    opts = {"disp": False}
    if cfg.time_limit is not None:
        opts["time_limit"] = cfg.time_limit
    if mip:
        opts["mip_rel_gap"] = cfg.mip_gap
        if cfg.node_limit is not None:
            opts["node_limit"] = cfg.node_limit
    return opts


def solve_lp(f: Formulation, cfg: SolverConfig | None = None) -> LpSolution:
    """Optimal value of the continuous relaxation (integrality dropped)."""
    cfg = cfg or SolverConfig()
    _check_linear(f)
    ids, c, A, lb, ub, vlo, vhi, _ = _matrixify(f)
    cons = LinearConstraint(A, lb, ub) if len(f.rows) else ()
    res = milp(c, constraints=cons, bounds=Bounds(vlo, vhi),
               integrality=np.zeros(len(ids)), options=_options(cfg, False))
    if res.status == 2:
        return LpSolution("infeasible", math.nan, {})
    if res.status == 3:
        return LpSolution("unbounded", math.nan, {})
    if res.status != 0 or res.x is None:
        raise SolverError(f"LP did not solve to optimality: {res.message}")
    vals = dict(zip(ids, (float(x) for x in res.x)))
    return LpSolution("optimal", float(res.fun) + f.objective.constant, vals)


def solve_mip(f: Formulation, cfg: SolverConfig | None = None) -> MipSolution:
    """Branch-and-bound optimum over the declared binaries."""
    cfg = cfg or SolverConfig()
    _check_linear(f)
    ids, c, A, lb, ub, vlo, vhi, integ = _matrixify(f)
    cons = LinearConstraint(A, lb, ub) if len(f.rows) else ()
    res = milp(c, constraints=cons, bounds=Bounds(vlo, vhi),
               integrality=integ, options=_options(cfg, True))
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    if res.status == 2:
        return MipSolution("infeasible", math.nan, math.nan, math.nan,
                           nodes, {})
    if res.status == 3:
        return MipSolution("unbounded", math.nan, math.nan, math.nan,
                           nodes, {})
    if res.x is None:
        raise SolverError(f"MIP terminated without incumbent: {res.message}")
    inc = float(res.fun) + f.objective.constant
    bound = getattr(res, "mip_dual_bound", None)
    bound = inc if bound is None else float(bound) + f.objective.constant
    gap = (inc - bound) / max(abs(inc), 1e-9)
    status = "optimal" if res.status == 0 else "limit"
    vals = dict(zip(ids, (float(x) for x in res.x)))
    return MipSolution(status, inc, bound, gap, nodes, vals)


def metrics(zmip: float, lp: LpSolution, binaries=None,
            int_tol: float = 1e-6) -> dict:
    """Integrality-gap and binary-integrality share of an LP relaxation.

    binaries: ids of the binary-declared variables; None counts every
    variable in the solution.
    """
    if zmip == 0:
        raise SolverError("integrality gap undefined for zmip = 0")
    igap = (zmip - lp.objective) / zmip
    if binaries is None:
        binaries = list(lp.values)
    vals = [lp.values[b] for b in binaries if b in lp.values]
    if vals:
        nb = sum(1 for x in vals
                 if min(abs(x), abs(x - 1.0)) <= int_tol) / len(vals)
    else:
        nb = 1.0
    return {"igap": igap, "nb": nb}


# ---- MPS ------------------------------------------------------------

_SENSE_TAG = {"<=": "L", ">=": "G", "=": "E"}


def _num(x: float) -> str:
    return f"{x:.12g}"


def _check_name(name: str) -> str:
    if not name or any(ch.isspace() for ch in name) or "'" in name:
        raise SolverError(f"name not MPS-safe: {name!r}")
    return name


def write_mps(f: Formulation, path) -> dict:
    """Deterministic free-format MPS; returns the written size counts."""
    _check_linear(f)
    out = [f"NAME UCF-{f.kind}", "ROWS", " N OBJ"]
    for r in f.rows:
        out.append(f" {_SENSE_TAG[r.sense]} {_check_name(r.name)}")
    # column-major nonzeros, objective entry first
    by_col: dict[str, list] = {vid: [] for vid in f.variables}
    for vid, co in f.objective.terms.items():
        by_col[vid].append(("OBJ", co))
    for r in f.rows:
        for vid, co in r.expr.terms.items():
            by_col[vid].append((r.name, co))
    out.append("COLUMNS")
    nz = 0
    marker = 0
    in_int = False
    for vid, v in f.variables.items():
        _check_name(vid)
        if v.integral != in_int:
            tag = "INTORG" if v.integral else "INTEND"
            out.append(f" MK{marker:07d} 'MARKER' '{tag}'")
            marker += 1
            in_int = v.integral
        entries = by_col[vid] or [("OBJ", 0.0)]
        for row, co in entries:
            out.append(f" {vid} {row} {_num(co)}")
            nz += row != "OBJ"
    if in_int:
        out.append(f" MK{marker:07d} 'MARKER' 'INTEND'")
    out.append("RHS")
    if f.objective.constant:
        out.append(f" RHS OBJ {_num(-f.objective.constant)}")
    for r in f.rows:
        if r.rhs:
            out.append(f" RHS {r.name} {_num(r.rhs)}")
    out.append("BOUNDS")
    for vid, v in f.variables.items():
        if v.lower:
            out.append(f" LO BND {vid} {_num(v.lower)}")
        if math.isinf(v.upper):
            out.append(f" PL BND {vid}")
        else:
            out.append(f" UP BND {vid} {_num(v.upper)}")
    out.append("ENDATA")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
    return {"rows": len(f.rows), "columns": len(f.variables),
            "nonzeros": nz}


def _mps_column_names(path) -> list:
    names = []
    seen = set()
    section = None
    with open(path) as fh:
        for line in fh:
            tok = line.split()
            if not tok:
                continue
            if not line[0].isspace():
                section = tok[0]
                continue
            if section == "COLUMNS" and "'MARKER'" not in tok:
                if tok[0] not in seen:
                    seen.add(tok[0])
                    names.append(tok[0])
    return names


def run_external(mps_path, cfg: SolverConfig | None = None) -> LpSolution:
    """Run the configured external solver on an MPS file and parse its
    solution file (`objective <num>` then `<var> <num>` lines)."""
    cfg = cfg or SolverConfig()
    template = cfg.external_cmd or os.environ.get("UCF_SOLVER_CMD")
    if not template:
        raise SolverError("no external solver configured "
                          "(set UCF_SOLVER_CMD or SolverConfig.external_cmd)")
    mps_path = str(mps_path)
    sol_path = mps_path + ".sol"
    cmd = [arg.format(mps=mps_path, sol=sol_path)
           for arg in shlex.split(template)]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True)
    except OSError as e:
        raise SolverError(f"external solver did not start: {e}") from e
    if proc.returncode != 0:
        tail = (proc.stderr or proc.stdout or "").strip()[-500:]
        raise SolverError(
            f"external solver exited with {proc.returncode}: {tail}")
    known = set(_mps_column_names(mps_path))
    objective = None
    values = {}
    try:
        with open(sol_path) as fh:
            lines = [ln.split() for ln in fh if ln.strip()]
    except OSError as e:
        raise SolverError(f"external solver wrote no solution file: {e}") \
            from e
    if not lines or lines[0][0] != "objective" or len(lines[0]) != 2:
        raise SolverError("solution file must start with 'objective <num>'")
    try:
        objective = float(lines[0][1])
    except ValueError:
        raise SolverError(
            f"bad objective value {lines[0][1]!r} in solution file") from None
    for tok in lines[1:]:
        if len(tok) != 2:
            raise SolverError(f"bad solution line {' '.join(tok)!r}")
        name, val = tok
        if name not in known:
            raise SolverError(f"unknown variable {name!r} in solution file")
        try:
            values[name] = float(val)
        except ValueError:
            raise SolverError(
                f"bad value {val!r} for variable {name!r}") from None
    return LpSolution("optimal", objective, values)
