#!/usr/bin/env python3
"""Standalone MPS solver used as the external-solver oracle in tests.

Reads a free-format MPS file, solves it with scipy's HiGHS bindings, and
writes a solution file (`objective <num>` then `<var> <num>` lines).  Kept
independent of the ucf package on purpose: it re-parses the MPS from
scratch so disagreements expose writer bugs.

Usage: solve_mps.py model.mps model.sol [--relax]
"""

import argparse
import math
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp


def parse_mps(path):
    rows = {}  # name -> sense
    row_order = []
    obj_row = None
    cols = {}  # name -> list[(row, coef)]
    col_order = []
    integral = set()
    rhs = {}
    bounds = {}  # name -> [lo, up]
    section = None
    in_int = False
    with open(path) as fh:
        for line in fh:
            if line.lstrip().startswith("*") or not line.strip():
                continue
            head = not line[0].isspace()
            tok = line.split()
            if head:
                section = tok[0]
                continue
            if section == "ROWS":
                sense, name = tok
                if sense == "N":
                    if obj_row is None:
                        obj_row = name
                    continue
                rows[name] = sense
                row_order.append(name)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_int = tok[2] == "'INTORG'"
                    continue
                name = tok[0]
                if name not in cols:
                    cols[name] = []
                    col_order.append(name)
                    if in_int:
                        integral.add(name)
                for i in range(1, len(tok) - 1, 2):
                    cols[name].append((tok[i], float(tok[i + 1])))
            elif section == "RHS":
                for i in range(1, len(tok) - 1, 2):
                    rhs[tok[i]] = float(tok[i + 1])
            elif section == "BOUNDS":
                kind, _, name = tok[0], tok[1], tok[2]
                val = float(tok[3]) if len(tok) > 3 else None
                b = bounds.setdefault(name, [0.0, math.inf])
                if kind == "LO":
                    b[0] = val
                elif kind == "UP":
                    b[1] = val
                elif kind == "FX":
                    b[0] = b[1] = val
                elif kind == "PL":
                    b[1] = math.inf
                elif kind == "MI":
                    b[0] = -math.inf
                elif kind == "FR":
                    b[0], b[1] = -math.inf, math.inf
                elif kind == "BV":
                    b[0], b[1] = 0.0, 1.0
                    integral.add(name)
                else:
                    raise ValueError(f"unsupported bound type {kind}")
            elif section == "RANGES":
                raise ValueError("RANGES not supported")
            elif section == "ENDATA":
                break
    if obj_row is None:
        raise ValueError("no objective (N) row")
    return (row_order, rows, obj_row, col_order, cols, integral, rhs, bounds)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("sol")
    ap.add_argument("--relax", action="store_true",
                    help="drop integrality and solve the LP relaxation")
    args = ap.parse_args(argv)

    (row_order, rows, obj_row, col_order, cols, integral, rhs,
     bounds) = parse_mps(args.mps)
    ridx = {name: i for i, name in enumerate(row_order)}
    cidx = {name: j for j, name in enumerate(col_order)}
    n, m = len(col_order), len(row_order)
    c = np.zeros(n)
    data, ri, ci = [], [], []
    for name, entries in cols.items():
        j = cidx[name]
        for row, coef in entries:
            if row == obj_row:
                c[j] += coef
            else:
                ri.append(ridx[row])
                ci.append(j)
                data.append(coef)
    lb = np.empty(m)
    ub = np.empty(m)
    for name, i in ridx.items():
        b = rhs.get(name, 0.0)
        sense = rows[name]
        lb[i] = -np.inf if sense == "L" else b
        ub[i] = np.inf if sense == "G" else b
    vlo = np.array([bounds.get(v, (0.0, math.inf))[0] for v in col_order])
    vhi = np.array([bounds.get(v, (0.0, math.inf))[1] for v in col_order])
    integ = np.zeros(n) if args.relax else np.array(
        [1 if v in integral else 0 for v in col_order])
    cons = LinearConstraint(sparse.csr_matrix((data, (ri, ci)),
                                              shape=(m, n)), lb, ub) \
        if m else ()
    res = milp(c, constraints=cons, bounds=Bounds(vlo, vhi),
               integrality=integ)
    if res.status != 0 or res.x is None:
        sys.stderr.write(f"solve failed: status={res.status} {res.message}\n")
        return 1
    # minimization objective; constant arrives as a RHS entry on the N row
    z = float(res.fun) - rhs.get(obj_row, 0.0)
    with open(args.sol, "w") as fh:
        fh.write(f"objective {z:.12g}\n")
        for v in col_order:
            fh.write(f"{v} {res.x[cidx[v]]:.12g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
