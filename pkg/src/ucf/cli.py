"""Command-line front end.

Subcommands: gen (synthetic instances), build (model assembly and stats),
solve (LP relaxation plus MIP), verify (facet reports for one unit's window
polytope), bench (batch runs with iGap/rTime/N_b/redu_con CSV output and
performance profiles).

Exit codes: 0 success, 2 validation error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import tempfile
import time
from dataclasses import dataclass, fields
from pathlib import Path

from .builder import (INTERVAL_KINDS, MODEL_KINDS, build_formulation,
                      default_window, piecewise_linearize)
from .instance import (UCFError, UCInstance, ValidationError, load_instance,
                       normalize_unit, status_bounds)
from .polylab import POLYTOPE_SPECS, build_polytope, facet_report_lines
from .solver import (SolverConfig, SolverError, metrics, run_external,
                     solve_lp, solve_mip, write_mps)
from .windows import feasible_intervals

_NAN = float("nan")


# ---- synthetic instances ---------------------------------------------

def generate_synthetic(seed: int, n_units: int, T: int) -> dict:
    """Deterministic desk-scale instance: unit parameters on dyadic grids,
    demand between total minimum output and 90% of capacity, reserve at
    10% of demand."""
    if n_units < 1:
        raise ValueError("n_units must be >= 1")
    if T < 2:
        raise ValueError("T must be >= 2")
    rng = random.Random(seed)
    units = []
    for i in range(n_units):
        p_min = rng.choice([40.0, 60.0, 80.0, 100.0])
        span = rng.choice([64.0, 96.0, 128.0, 160.0])
        ramp = span * rng.choice([0.25, 0.375, 0.5])
        edge = p_min + span * rng.choice([0.0, 0.125, 0.25])
        t_on = rng.choice([1, 2, 3])
        t_off = rng.choice([1, 2, 3])
        units.append({
            "id": f"u{i + 1}",
            "p_min": p_min,
            "p_max": p_min + span,
            "p_up": ramp,
            "p_down": ramp,
            "p_start": edge,
            "p_shut": edge,
            "t_on": t_on,
            "t_off": t_off,
            "t_cold": t_off + rng.choice([0, 1]),
            "alpha": float(rng.choice([100, 150, 200])),
            "beta": float(rng.choice([6, 10, 14])),
            "gamma": rng.choice([0.0, 0.015625, 0.03125]),
            "c_hot": float(rng.choice([200, 300, 400])),
            "c_cold": float(rng.choice([400, 600, 800])),
            "u0": 1,
            "t0": t_on,
            "p0": p_min + span * 0.25,
        })
    lo = sum(u["p_min"] for u in units)
    hi = 0.9 * sum(u["p_max"] for u in units)
    # smooth dyadic day shape; steps of at most 1/8 keep every kind
    # ramp-feasible from the common initial point at 1/4 band
    shape = [0.25, 0.375, 0.5, 0.625, 0.75, 0.75, 0.625, 0.5,
             0.375, 0.25, 0.25, 0.375]
    f = []
    level = 0.25
    for t in range(T):
        target = shape[t % len(shape)]
        level = target + rng.choice([0.0, 0.0625]) * (1 if level < 0.7 else -1)
        f.append(level)
    demand = [lo + (hi - lo) * x for x in f]
    data = {
        "T": T,
        "demand": demand,
        "reserve": [0.1 * d for d in demand],
        "units": units,
    }
    load_instance(data)  # self-check: the generator must emit valid files
    return data


# ---- benchmarking -----------------------------------------------------

@dataclass
class BenchRecord:
    """One (instance, kind) benchmark row.

    igap uses the instance's shared incumbent (minimum across kinds); nb is
    the share of binary variables integral at the relaxation optimum;
    redu_con is the constraint-count decrease of the filtered interval
    model against the full enumeration (interval kinds only); rtime is
    relative to the 3p row of the same instance.
    """

    case: str
    kind: str
    n_vars: int = 0
    n_rows: int = 0
    n_nonzeros: int = 0
    z_cr: float = _NAN
    z_mip: float = _NAN
    igap: float = _NAN
    time_s: float = 0.0
    nb: float = _NAN
    redu_con: float = _NAN
    rtime: float = _NAN
    error: str = ""

    @classmethod
    def from_row(cls, row: dict) -> "BenchRecord":
        kw = {}
        for f in fields(cls):
            raw = row[f.name]
            if f.type in ("int",):
                kw[f.name] = int(raw)
            elif f.name in ("case", "kind", "error"):
                kw[f.name] = raw
            else:
                kw[f.name] = float(raw) if raw != "" else _NAN
        return cls(**kw)


BENCH_COLUMNS = tuple(f.name for f in fields(BenchRecord))


def _norm_instances(instances):
    if isinstance(instances, dict):
        return list(instances.items())
    return [pair for pair in instances]


def bench_run(instances, kinds=MODEL_KINDS, windows=None,
              cfg: SolverConfig | None = None, pieces: int = 8):
    """Benchmark every (instance, kind) pair; returns BenchRecords in that
    deterministic order.  A failing pair keeps its row, with the failure in
    the error column."""
    cfg = cfg or SolverConfig()
    records: list[BenchRecord] = []
    warnings: list[str] = []
    for case, inst in _norm_instances(instances):
        group: list[BenchRecord] = []
        lps = {}
        for kind in kinds:
            rec = BenchRecord(case=case, kind=kind)
            group.append(rec)
            t0 = time.perf_counter()
            try:
                f = build_formulation(inst, kind, windows)
                if kind == "mp1":
                    # constraint-count decrease of the filtered model
                    # against the full ramp enumeration, both counted
                    # before cost linearization
                    full = build_formulation(inst, kind, windows,
                                             ramp_rows="all")
                    rec.redu_con = (len(full.rows) - len(f.rows)) \
                        / len(full.rows)
                if f.quad_objective:
                    f = piecewise_linearize(f, pieces)
                st = f.stats
                rec.n_vars = st["variables"]
                rec.n_rows = st["rows"]
                rec.n_nonzeros = st["nonzeros"]
                lp = solve_lp(f, cfg)
                rec.z_cr = lp.objective
                if cfg.external_cmd:
                    with tempfile.TemporaryDirectory() as td:
                        mps = Path(td) / f"{case}-{kind}.mps"
                        write_mps(f, mps)
                        ext = run_external(mps, cfg)
                    if ext.status != "optimal":
                        raise SolverError(f"external status {ext.status}")
                    rec.z_mip = ext.objective
                else:
                    mip = solve_mip(f, cfg)
                    if mip.status not in ("optimal", "limit"):
                        raise SolverError(f"MIP status {mip.status}")
                    rec.z_mip = mip.objective
                lps[kind] = (lp, [v.id for v in f.variables.values()
                                  if v.integral])
            except (UCFError, ValueError) as exc:
                rec.error = str(exc)
            rec.time_s = time.perf_counter() - t0
        # shared incumbent across kinds, as the experimental protocol fixes
        z_shared = min((r.z_mip for r in group if not r.error),
                       default=_NAN)
        for rec in group:
            if rec.error or rec.kind not in lps:
                continue
            lp, binaries = lps[rec.kind]
            m = metrics(z_shared, lp, binaries, cfg.int_tol)
            rec.z_mip = z_shared
            rec.igap = m["igap"]
            rec.nb = m["nb"]
        ref = next((r.time_s for r in group
                    if r.kind == "3p" and not r.error), None)
        if ref:
            for rec in group:
                if not rec.error:
                    rec.rtime = (rec.time_s - ref) / ref
        two = next((r.nb for r in group
                    if r.kind == "2p" and not r.error), None)
        tp = [r for r in group if r.kind in INTERVAL_KINDS and not r.error]
        if two is not None:
            for r in tp:
                if r.nb < two - 0.05:
                    warnings.append(
                        f"{case}: nb({r.kind})={r.nb:.3f} below "
                        f"nb(2p)={two:.3f} by more than 0.05")
        records.extend(group)
    for msg in warnings:  # trend violations are flagged, never fatal
        print(f"warning: {msg}", file=sys.stderr)
    return records


def bench_csv(records) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: getattr(r, k) for k in BENCH_COLUMNS})
    return buf.getvalue()


def parse_bench_csv(text: str):
    return [BenchRecord.from_row(row)
            for row in csv.DictReader(io.StringIO(text))]


def performance_profile(times: dict):
    """Per-model step curves rho_s(tau): share of problems where the model
    is within factor tau of the per-problem best time.

    times maps model -> per-problem seconds, either a list (aligned by
    position) or a dict keyed by problem id.
    """
    if not times:
        raise ValueError("no timing data")
    models = list(times)
    first = times[models[0]]
    keys = list(first) if isinstance(first, dict) else range(len(first))
    table = {}
    for s in models:
        row = times[s]
        vals = [row[k] for k in keys] if isinstance(row, dict) \
            else list(row)
        if len(vals) != len(keys):
            raise ValueError(f"model {s!r} covers a different problem set")
        if not vals:
            raise ValueError("no timing data")
        if any(v <= 0 for v in vals):
            raise ValueError("times must be positive")
        table[s] = vals
    n_p = len(keys)
    best = [min(table[s][i] for s in models) for i in range(n_p)]
    ratios = {s: [table[s][i] / best[i] for i in range(n_p)]
              for s in models}
    taus = sorted({r for rs in ratios.values() for r in rs})
    return {s: [(tau, sum(1 for r in ratios[s] if r <= tau) / n_p)
                for tau in taus]
            for s in models}


def profile_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "tau", "rho"])
    for s in sorted(curves):
        for tau, rho in curves[s]:
            w.writerow([s, tau, rho])
    return buf.getvalue()


# ---- argument plumbing ------------------------------------------------

def _window_arg(inst: UCInstance, token: str | None):
    if token is None or token == "H":
        return None
    if token == "T":
        return inst.T + 1
    return int(token)


def _load_all(paths):
    out = []
    for p in paths:
        out.append((Path(p).stem, load_instance(p)))
    return out


def _outdir(args) -> Path:
    out = Path(args.out) if args.out else Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cfg(args) -> SolverConfig:
    return SolverConfig(external_cmd=getattr(args, "solver_cmd", None))


def _arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ucf",
        description="unit-commitment formulation engine and polyhedral lab")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, instances=True):
        p.add_argument("--model", choices=MODEL_KINDS, default="mp3")
        p.add_argument("--window",
                       help="interval width: 2, 3, an integer, H or T")
        p.add_argument("--pieces", type=int, default=8,
                       help="tangent count for quadratic costs")
        p.add_argument("--out", help="output directory")
        if instances:
            p.add_argument("instance", nargs="+",
                           help="instance JSON files")

    g = sub.add_parser("gen", help="write a synthetic instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--units", type=int, default=2)
    g.add_argument("--horizon", type=int, default=8)
    g.add_argument("--out", help="output directory")

    b = sub.add_parser("build", help="assemble a model and print its size")
    common(b)
    b.add_argument("--emit-mps", action="store_true")

    s = sub.add_parser("solve", help="solve the relaxation and the MIP")
    common(s)
    s.add_argument("--emit-mps", action="store_true")
    s.add_argument("--solver-cmd",
                   help="external command template with {mps} and {sol}")

    v = sub.add_parser("verify", help="facet reports for a window polytope")
    v.add_argument("--spec", choices=POLYTOPE_SPECS, default="Q")
    v.add_argument("--window", default="3")
    v.add_argument("--unit", help="unit id (default: first)")
    v.add_argument("--out", help="output directory")
    v.add_argument("instance", nargs=1)

    e = sub.add_parser("bench", help="benchmark kinds over instances")
    e.add_argument("--model", action="append", choices=MODEL_KINDS,
                   help="kind to include (repeatable; default: all)")
    e.add_argument("--window",
                   help="interval width: 2, 3, an integer, H or T")
    e.add_argument("--pieces", type=int, default=8)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--units", type=int, default=2)
    e.add_argument("--horizon", type=int, default=8)
    e.add_argument("--solver-cmd")
    e.add_argument("--out", help="output directory")
    e.add_argument("--emit-mps", action="store_true")
    e.add_argument("instance", nargs="*",
                   help="instance files (default: 3 synthetic cases)")
    return ap


def _cmd_gen(args) -> int:
    data = generate_synthetic(args.seed, args.units, args.horizon)
    out = _outdir(args)
    path = out / f"synth-s{args.seed}-u{args.units}-t{args.horizon}.json"
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(path)
    return 0


def _build_one(inst: UCInstance, args):
    f = build_formulation(inst, args.model, _window_arg(inst, args.window))
    if f.quad_objective:
        f = piecewise_linearize(f, args.pieces)
    return f


def _cmd_build(args) -> int:
    out = _outdir(args)
    for name, inst in _load_all(args.instance):
        f = _build_one(inst, args)
        st = f.stats
        st["case"] = name
        if args.emit_mps:
            st["mps"] = str(out / f"{name}-{args.model}.mps")
            write_mps(f, st["mps"])
        print(json.dumps(st, sort_keys=True))
    return 0


def _cmd_solve(args) -> int:
    cfg = _cfg(args)
    out = _outdir(args)
    for name, inst in _load_all(args.instance):
        f = _build_one(inst, args)
        lp = solve_lp(f, cfg)
        mps_path = out / f"{name}-{args.model}.mps"
        if args.emit_mps or cfg.external_cmd:
            write_mps(f, mps_path)
        if cfg.external_cmd:
            ext = run_external(mps_path, cfg)
            z_mip, status = ext.objective, ext.status
        else:
            mip = solve_mip(f, cfg)
            if mip.status not in ("optimal", "limit"):
                raise SolverError(f"MIP did not solve: {mip.status}")
            z_mip, status = mip.objective, mip.status
        binaries = [v.id for v in f.variables.values() if v.integral]
        m = metrics(z_mip, lp, binaries) if z_mip else \
            {"igap": _NAN, "nb": _NAN}
        print(json.dumps({"case": name, "kind": args.model,
                          "status": status, "z_cr": lp.objective,
                          "z_mip": z_mip, **m}, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    inst = load_instance(args.instance[0])
    unit = inst.units[0]
    if args.unit:
        matches = [u for u in inst.units if u.id == args.unit]
        if not matches:
            raise ValidationError([f"no unit {args.unit!r}"])
        unit = matches[0]
    nu = normalize_unit(unit)
    M = int(args.window) if args.window not in ("H", "T") else \
        (inst.T + 1 if args.window == "T" else default_window(nu, inst.T))
    sb = status_bounds(unit, inst.T)
    tilde = args.spec.endswith("~")
    history = "online" if unit.u0 else "offline"
    A = feasible_intervals(0, M, inst.T, unit.t_on,
                           history=history if tilde else "none",
                           sb=sb if tilde else None, t_off=unit.t_off)
    p = build_polytope(args.spec, A, nu, sb=sb if tilde else None,
                       t_off=unit.t_off)
    lines = facet_report_lines(p)
    text = "\n".join(lines) + "\n"
    if args.out:
        path = _outdir(args) / f"verify-{unit.id}-{args.spec.rstrip('~')}" \
            f"{'t' if tilde else ''}-m{M}.jsonl"
        path.write_text(text)
        print(path)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench(args) -> int:
    kinds = tuple(args.model) if args.model else MODEL_KINDS
    if args.instance:
        named = _load_all(args.instance)
    else:
        named = []
        for i in range(3):
            data = generate_synthetic(args.seed + i, args.units,
                                      args.horizon)
            named.append((f"synth-{args.seed + i}", load_instance(data)))
    cfg = SolverConfig(external_cmd=args.solver_cmd)

    def winfor(inst):
        return _window_arg(inst, args.window)

    records = []
    for name, inst in named:
        records.extend(bench_run([(name, inst)], kinds, winfor(inst),
                                 cfg, args.pieces))
        if args.emit_mps:
            out = _outdir(args)
            for kind in kinds:
                f = build_formulation(inst, kind, winfor(inst))
                if f.quad_objective:
                    f = piecewise_linearize(f, args.pieces)
                write_mps(f, out / f"{name}-{kind}.mps")
    text = bench_csv(records)
    ok = [r for r in records if not r.error]
    times = {}
    for r in ok:
        times.setdefault(r.kind, {})[r.case] = max(r.time_s, 1e-9)
    cases = {r.case for r in ok}
    full = {s: row for s, row in times.items() if set(row) == cases}
    if args.out:
        out = _outdir(args)
        (out / "bench.csv").write_text(text)
        if full:
            (out / "profile.csv").write_text(
                profile_csv(performance_profile(full)))
        print(out / "bench.csv")
    else:
        sys.stdout.write(text)
    failures = [r for r in records if r.error]
    for r in failures:
        print(f"warning: {r.case}/{r.kind}: {r.error}", file=sys.stderr)
    return 0


_COMMANDS = {"gen": _cmd_gen, "build": _cmd_build, "solve": _cmd_solve,
             "verify": _cmd_verify, "bench": _cmd_bench}


def main(argv=None) -> int:
    args = _arg_parser().parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UCFError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
