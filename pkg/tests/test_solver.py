"""Embedded LP/MIP solving, relaxation metrics, MPS export, external runs."""
import hashlib
import itertools
import math
import sys
from pathlib import Path

import pytest

from ucf import (LpSolution, SolverConfig, SolverError, build_formulation,
                 metrics, run_external, solve_lp, solve_mip, write_mps)
from ucf.expr import Formulation, LinExpr, Variable

TOOL = Path(__file__).resolve().parents[1] / "tools" / "solve_mps.py"
EXT_CMD = f"{sys.executable} {TOOL} {{mps}} {{sol}}"


def toy_lp():
    f = Formulation(kind="toy")
    f.add_var(Variable("x", "z", 0.0, 10.0))
    f.objective = LinExpr.var("x")
    f.add_row("floor", LinExpr.var("x"), ">=", 1.0)
    return f


def test_lp_toy():
    sol = solve_lp(toy_lp())
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(1.0)
    assert sol.values["x"] == pytest.approx(1.0)


def test_lp_infeasible_is_reported_not_raised():
    f = toy_lp()
    f.add_row("cap", LinExpr.var("x"), "<=", 0.5)
    sol = solve_lp(f)
    assert sol.status == "infeasible"
    assert math.isnan(sol.objective) and sol.values == {}


def test_mip_matches_brute_force():
    # knapsack: max 4a+5b+6c with 2a+3b+4c <= 5
    f = Formulation(kind="toy")
    weights = {"a": 2.0, "b": 3.0, "c": 4.0}
    gains = {"a": 4.0, "b": 5.0, "c": 6.0}
    e = LinExpr()
    for v in weights:
        f.add_var(Variable(v, "z", 0.0, 1.0, True))
        f.objective.add_term(v, -gains[v])
        e.add_term(v, weights[v])
    f.add_row("weight", e, "<=", 5.0)
    sol = solve_mip(f, SolverConfig(mip_gap=0.0))
    best = min(
        sum(-gains[v] * x for v, x in zip("abc", pick))
        for pick in itertools.product((0, 1), repeat=3)
        if sum(weights[v] * x for v, x in zip("abc", pick)) <= 5.0)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(best)
    assert sol.bound <= sol.objective + 1e-9
    assert sol.gap == pytest.approx(0.0, abs=1e-9)
    assert all(abs(x - round(x)) <= 1e-6 for x in sol.values.values())


def test_metrics():
    lp = LpSolution("optimal", 9.0, {"a": 1.0, "b": 0.5, "c": 0.0})
    out = metrics(10.0, lp, binaries=["a", "b", "c"])
    assert out["igap"] == pytest.approx(0.1)
    assert out["nb"] == pytest.approx(2 / 3)
    assert metrics(10.0, lp)["nb"] == pytest.approx(2 / 3)
    with pytest.raises(SolverError):
        metrics(0.0, lp)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(feas_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(int_tol=-1e-9)


def test_quadratic_objective_refused(inst2u):
    f = build_formulation(inst2u, "mp1", windows=3)
    with pytest.raises(SolverError):
        solve_lp(f)
    with pytest.raises(SolverError):
        write_mps(f, "/dev/null")


def test_write_mps_deterministic(inst1u, tmp_path):
    f = build_formulation(inst1u, "mp1", windows=3)
    digests = []
    for name in ("a.mps", "b.mps"):
        info = write_mps(f, tmp_path / name)
        digests.append(hashlib.sha256((tmp_path / name).read_bytes())
                       .hexdigest())
    assert digests[0] == digests[1]
    s = f.stats
    assert info == {"rows": s["rows"], "columns": s["variables"],
                    "nonzeros": s["nonzeros"]}


def test_external_roundtrip(inst1u, tmp_path):
    f = build_formulation(inst1u, "3p")
    mps = tmp_path / "m.mps"
    write_mps(f, mps)
    ext = run_external(mps, SolverConfig(external_cmd=EXT_CMD))
    assert ext.status == "optimal"
    assert ext.objective == pytest.approx(
        solve_mip(f, SolverConfig(mip_gap=0.0)).objective, abs=1e-6)
    relaxed = run_external(mps, SolverConfig(
        external_cmd=EXT_CMD + " --relax"))
    assert relaxed.objective == pytest.approx(solve_lp(f).objective, abs=1e-6)
    assert set(relaxed.values) == set(f.variables)


def test_external_not_configured(tmp_path, monkeypatch):
    monkeypatch.delenv("UCF_SOLVER_CMD", raising=False)
    with pytest.raises(SolverError, match="no external solver"):
        run_external(tmp_path / "m.mps")


def test_external_spawn_failure(inst1u, tmp_path):
    mps = tmp_path / "m.mps"
    write_mps(build_formulation(inst1u, "3p"), mps)
    cfg = SolverConfig(external_cmd="/nonexistent/solver {mps} {sol}")
    with pytest.raises(SolverError, match="did not start"):
        run_external(mps, cfg)


def test_external_nonzero_exit(inst1u, tmp_path):
    mps = tmp_path / "m.mps"
    write_mps(build_formulation(inst1u, "3p"), mps)
    cfg = SolverConfig(
        external_cmd=f"{sys.executable} -c 'import sys; sys.exit(5)'")
    with pytest.raises(SolverError, match="exited with 5"):
        run_external(mps, cfg)


def test_external_bad_solution_file(inst1u, tmp_path):
    mps = tmp_path / "m.mps"
    write_mps(build_formulation(inst1u, "3p"), mps)
    script = "import sys; open(sys.argv[1], 'w').write('garbage 1 2\\n')"
    cfg = SolverConfig(
        external_cmd=f'{sys.executable} -c "{script}" {{sol}}')
    with pytest.raises(SolverError, match="objective"):
        run_external(mps, cfg)
    script = "import sys; open(sys.argv[1], 'w').write('objective 1\\nzz 1\\n')"
    cfg = SolverConfig(
        external_cmd=f'{sys.executable} -c "{script}" {{sol}}')
    with pytest.raises(SolverError, match="unknown variable"):
        run_external(mps, cfg)
