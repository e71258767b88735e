"""Assembly of the unit-commitment model family.

Seven interchangeable shapes of the same scheduling problem:

* ``2p`` / ``3p``        classic binary models in MW space (two- and
                         three-index generation bounds)
* ``3p-hd``              normalized three-binary model whose window-2
                         bound and ramp rows are facet-shaped, with an
                         auxiliary on-off-on indicator
* ``mp1``                pure interval-variable model over sliding windows
* ``mp2``                interval variables linked to the binary space
* ``mp3``                binary model carrying only interior interval
                         variables; boundary ones are eliminated
* ``mp-ti``              ``mp3`` with the pre-horizon status folded into
                         the interval sets and bound coefficients

All shapes share the system rows (balance, reserve) and the startup-cost
shaping, so their MIP optima agree; the LP relaxations tighten from
``2p`` towards ``mp3``/``mp-ti`` with growing window width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._num import lt, snap_ceil
from .bounds import FacetQuery, facet_predicate, lb_power, ub_power, ub_ramp
from .expr import Formulation, LinExpr, Variable
from .instance import (
    NormalizedUnit,
    UCInstance,
    UnitParams,
    normalize_unit,
    status_bounds,
    warm_start_flag,
)
from .windows import (
    IntervalSet,
    consistency_rows,
    feasible_intervals,
    link_u,
    link_v,
    link_w,
    packing_expr,
)

MODEL_KINDS = ("2p", "3p", "3p-hd", "mp1", "mp2", "mp3", "mp-ti")

#: kinds whose generation bounds live on interval variables
INTERVAL_KINDS = ("mp1", "mp2", "mp3", "mp-ti")

#: ramp-row selection: "model" keeps the windows' designated spans plus the
#: closed-form facet test, "facet" keeps every span passing the facet test,
#: "all" keeps the full enumeration
RAMP_MODES = ("model", "facet", "all")


def _pos(x: float) -> float:
    return x if x > 0.0 else 0.0


def default_window(nu: NormalizedUnit, T: int | None = None) -> int:
    """Smallest window width beyond which no window row can be a facet.

    A window must let the unit traverse its whole band: ramp from the
    startup level to the top, descend from the top to the shutdown level,
    and cross the band in either direction one step at a time.  Capped at
    T + 1 when the horizon is given.
    """
    h = max(
        snap_ceil((1.0 - nu.pt_start) / nu.pt_up) + 1,
        snap_ceil((1.0 - nu.pt_shut) / nu.pt_down) + 1,
        snap_ceil(1.0 / nu.pt_up),
        snap_ceil(1.0 / nu.pt_down),
        2,
    )
    if T is not None:
        h = min(h, T + 1)
    return h


@dataclass(frozen=True)
class EliminationSystem:
    """Boundary interval variables of one window expressed in the basis
    (commitments, startups, interior interval variables).

    ``solved`` maps every member (h, k) of the unrestricted interval family
    to a LinExpr over abstract keys ("u", t), ("v", t), ("tau", m, h, k);
    interval family members absent from the window's feasible set appear as
    the zero expression (interior) or are listed in ``absent`` (boundary,
    to be pinned to zero by an equality row).  ``bounded`` lists boundary
    members that stay in the model implicitly and need 0..1 box rows.
    """

    m: int
    M: int
    basis: tuple
    solved: dict
    bounded: tuple
    absent: tuple


def elimination_solve(A: IntervalSet) -> EliminationSystem:
    """Invert the link system of window A for the boundary interval terms.

    The commitment links (one per period) and startup links (one per
    period after the first) form a square system in the boundary interval
    variables once the interior ones are moved to the right-hand side; its
    unique solution is built here bottom-up:

    * intervals ending at k < end match the shutdown at k+1:
      tau[m,k] = u_k - u_{k+1} + v_{k+1} - sum_h tau[h,k]
    * intervals starting at h > m match the startup at h:
      tau[h,end] = v_h - sum_{k<end} tau[h,k]
    * the full-window interval balances the last commitment link:
      tau[m,end] = u_end - sum_{h>m} tau[h,end]
    """
    m, end = A.m, A.end
    members = {(i.h, i.k) for i in A.intervals}
    solved: dict = {}
    basis_tau = []
    for h in range(m + 1, end):
        for k in range(h, end):
            if (h, k) in members:
                solved[(h, k)] = LinExpr.var(("tau", m, h, k))
                basis_tau.append(("tau", m, h, k))
            else:
                solved[(h, k)] = LinExpr.const(0.0)
    for k in range(m, end):
        e = LinExpr.var(("u", k))
        e.add_term(("u", k + 1), -1.0)
        e.add_term(("v", k + 1), 1.0)
        for h in range(m + 1, k + 1):
            e.add(solved[(h, k)], -1.0)
        solved[(m, k)] = e
    for h in range(end, m, -1):
        e = LinExpr.var(("v", h))
        for k in range(h, end):
            e.add(solved[(h, k)], -1.0)
        solved[(h, end)] = e
    e = LinExpr.var(("u", end))
    for h in range(m + 1, end + 1):
        e.add(solved[(h, end)], -1.0)
    solved[(m, end)] = e
    boundary = [(m, k) for k in range(m, end + 1)]
    boundary += [(h, end) for h in range(m + 1, end + 1)]
    basis = tuple(
        [("u", t) for t in range(m, end + 1)]
        + [("v", t) for t in range(m + 1, end + 1)]
        + basis_tau
    )
    return EliminationSystem(
        m=A.m,
        M=A.M,
        basis=basis,
        solved=solved,
        bounded=tuple(hk for hk in boundary if hk in members),
        absent=tuple(hk for hk in boundary if hk not in members),
    )


def _resolve_windows(inst: UCInstance, windows) -> dict:
    out = {}
    for u in inst.units:
        if isinstance(windows, dict):
            w = windows.get(u.id)
        else:
            w = windows
        if w is None:
            w = default_window(normalize_unit(u), inst.T)
        w = int(w)
        if not 2 <= w <= inst.T + 1:
            raise ValueError(
                f"window width {w} for unit {u.id!r} outside [2, T+1]")
        out[u.id] = w
    return out


class _UnitCtx:
    """Per-unit assembly state: accessors return fresh expressions for the
    commitment/startup/shutdown/power level at a period in whatever space
    the model kind uses, with pre-horizon values folded in as constants."""

    def __init__(self, f: Formulation, unit: UnitParams, kind: str, T: int,
                 M: int | None, ramp_mode: str):
        self.f = f
        self.u = unit
        self.nu = normalize_unit(unit)
        self.uid = unit.id
        self.kind = kind
        self.T = T
        self.M = M
        self.ramp_mode = ramp_mode
        self.sb = status_bounds(unit, T)
        self.u0 = unit.u0
        self.pt0 = self.nu.pt0 if unit.u0 == 1 else 0.0
        self.p0 = unit.p0 if (unit.u0 == 1 and unit.p0 is not None) else 0.0
        self.sets: dict[int, IntervalSet] = {}
        self.elim: dict[int, EliminationSystem] = {}
        if kind in INTERVAL_KINDS:
            hist = "none"
            if kind == "mp-ti":
                hist = "online" if unit.u0 == 1 else "offline"
            for m in range(0, T - M + 2):
                self.sets[m] = feasible_intervals(
                    m, M, T, unit.t_on, history=hist, sb=self.sb,
                    t_off=unit.t_off)
            if kind in ("mp3", "mp-ti"):
                self.elim = {m: elimination_solve(A)
                             for m, A in self.sets.items()}

    # ---- variable ids ----------------------------------------------

    def tau_vid(self, m: int, h: int, k: int) -> str:
        return f"tau[{self.uid},{m},{h},{k}]"

    def _vid(self, name: str, t: int) -> str:
        return f"{name}[{self.uid},{t}]"

    # ---- accessors (fresh LinExpr per call) ------------------------

    def uvar(self, t: int) -> LinExpr:
        if t == 0:
            return LinExpr.const(float(self.u0))
        return LinExpr.var(self._vid("u", t))

    def vvar(self, t: int) -> LinExpr:
        return LinExpr.var(self._vid("v", t))

    def wvar(self, t: int) -> LinExpr:
        return LinExpr.var(self._vid("w", t))

    def pvar(self, t: int) -> LinExpr:
        if t == 0:
            return LinExpr.const(self.p0)
        return LinExpr.var(self._vid("p", t))

    def ptvar(self, t: int) -> LinExpr:
        if t == 0:
            return LinExpr.const(self.pt0)
        return LinExpr.var(self._vid("pt", t))

    def svar(self, t: int) -> LinExpr:
        return LinExpr.var(self._vid("s", t))

    def t3var(self, t: int) -> LinExpr:
        # the on-off-on indicator exists only for single-period-minimum units
        if self.u.t_on == 1:
            return LinExpr.var(self._vid("t3", t))
        return LinExpr.const(0.0)

    def _lift(self, expr: LinExpr) -> LinExpr:
        """Map an abstract window expression onto this unit's variables."""
        out = LinExpr.const(expr.constant)
        for key, c in expr.terms.items():
            tag = key[0]
            if tag == "u":
                out.add(self.uvar(key[1]), c)
            elif tag == "v":
                out.add(self.vvar(key[1]), c)
            else:
                out.add_term(self.tau_vid(key[1], key[2], key[3]), c)
        return out

    def u_of(self, t: int) -> LinExpr:
        if self.kind == "mp1":
            m = min(t, self.T - self.M + 1)
            return self._lift(link_u(self.sets[m], t))
        return self.uvar(t)

    def v_of(self, t: int) -> LinExpr:
        if self.kind == "mp1":
            m = max(0, t - self.M + 1)
            return self._lift(link_v(self.sets[m], t))
        return self.vvar(t)

    def w_of(self, t: int) -> LinExpr:
        if self.kind == "mp1":
            m = min(t - 1, self.T - self.M + 1)
            return self._lift(link_w(self.sets[m], t))
        return self.wvar(t)

    def _tau_expr(self, m: int):
        if self.kind in ("mp3", "mp-ti"):
            es = self.elim[m]
            return lambda h, k: self._lift(es.solved[(h, k)])
        return lambda h, k: LinExpr.var(self.tau_vid(m, h, k))

    def _history_window(self, m: int) -> bool:
        # bound coefficients reference the initial run only while the
        # window can still overlap it
        return (self.kind == "mp-ti" and self.u.u0 == 1
                and m <= self.sb.u_run + self.u.t_off)

    # ---- variable declaration --------------------------------------

    def declare(self) -> None:
        f, T, uid = self.f, self.T, self.uid
        if self.kind != "mp1":
            for name in ("u", "v", "w"):
                for t in range(1, T + 1):
                    f.add_var(Variable(self._vid(name, t), name,
                                       0.0, 1.0, True))
        if self.kind == "3p-hd" and self.u.t_on == 1:
            for t in range(1, T):
                f.add_var(Variable(self._vid("t3", t), "t3", 0.0, 1.0, True))
        if self.kind in INTERVAL_KINDS:
            interior_only = self.kind in ("mp3", "mp-ti")
            for m in sorted(self.sets):
                A = self.sets[m]
                for (h, k) in A.intervals:
                    if interior_only and (h == A.m or k == A.end):
                        continue
                    f.add_var(Variable(self.tau_vid(m, h, k), "tau",
                                       0.0, 1.0, True))
        if self.kind in ("2p", "3p"):
            for t in range(1, T + 1):
                f.add_var(Variable(self._vid("p", t), "p", 0.0, self.u.p_max))
        else:
            for t in range(1, T + 1):
                f.add_var(Variable(self._vid("pt", t), "pt", 0.0, 1.0))
        for t in range(1, T + 1):
            f.add_var(Variable(self._vid("s", t), "s", 0.0, math.inf))

    # ---- row families ----------------------------------------------

    def _row(self, name: str, expr: LinExpr, sense: str, rhs: float) -> None:
        self.f.add_row(name, expr, sense, rhs)

    def rows_logic_core(self) -> None:
        """Transition logic, minimum up/down, and the initial-status lock
        in the binary space."""
        u, uid, T = self.u, self.uid, self.T
        W, L = self.sb.w_lock, self.sb.l_lock
        for t in range(1, T + 1):
            e = self.vvar(t)
            e.add(self.wvar(t), -1.0)
            e.add(self.uvar(t), -1.0)
            e.add(self.uvar(t - 1), 1.0)
            self._row(f"logic[{uid},{t}]", e, "=", 0.0)
        for t in range(W + 1, T + 1):
            e = LinExpr()
            for w in range(max(1, t - u.t_on + 1), t + 1):
                e.add(self.vvar(w), 1.0)
            e.add(self.uvar(t), -1.0)
            self._row(f"minup[{uid},{t}]", e, "<=", 0.0)
        for t in range(L + 1, T + 1):
            e = LinExpr()
            for w in range(max(1, t - u.t_off + 1), t + 1):
                e.add(self.wvar(w), 1.0)
            e.add(self.uvar(t), 1.0)
            self._row(f"mindn[{uid},{t}]", e, "<=", 1.0)
        for t in range(1, W + L + 1):
            self._row(f"lock[{uid},{t}]", self.uvar(t), "=", float(u.u0))

    def rows_startup(self) -> None:
        """Startup-cost shaping: hot cost always, cold surcharge unless a
        recent shutdown (or short pre-horizon downtime) keeps the unit warm.

        MW kinds carry the full cost in s; normalized kinds price the hot
        part in the objective and keep only the cold excess in s."""
        u, uid, T = self.u, self.uid, self.T
        mw = self.kind in ("2p", "3p")
        dc = u.c_cold - u.c_hot
        for t in range(1, T + 1):
            if mw:
                e = self.v_of(t).scaled(u.c_hot)
                e.add(self.svar(t), -1.0)
                self._row(f"shot[{uid},{t}]", e, "<=", 0.0)
            warm = warm_start_flag(u, t)
            coef = u.c_cold if mw else dc
            e = self.v_of(t).scaled(coef)
            for pi in range(max(1, t - u.t_off - u.t_cold), t):
                e.add(self.w_of(pi), -coef)
            e.add(self.svar(t), -1.0)
            name = "scold" if mw else "scost"
            self._row(f"{name}[{uid},{t}]", e, "<=", coef * warm)

    # ---- MW kinds ---------------------------------------------------

    def rows_2p(self) -> None:
        u, uid, T = self.u, self.uid, self.T
        for t in range(1, T + 1):
            e = self.uvar(t).scaled(u.p_min)
            e.add(self.pvar(t), -1.0)
            self._row(f"pmin[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T + 1):
            e = self.pvar(t)
            e.add(self.uvar(t), -u.p_max)
            self._row(f"pmax[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T + 1):
            self._row(f"rup[{uid},{t}]", self._ramp_up_basic(t), "<=", 0.0)
        for t in range(1, T + 1):
            self._row(f"rdn[{uid},{t}]", self._ramp_dn_basic(t), "<=", 0.0)

    def _ramp_up_basic(self, t: int) -> LinExpr:
        # P_t - P_{t-1} within the running ramp, relaxed to the startup
        # level on a start
        u = self.u
        e = self.pvar(t)
        e.add(self.pvar(t - 1), -1.0)
        e.add(self.uvar(t), -(u.p_up + u.p_min))
        e.add(self.uvar(t - 1), u.p_min)
        e.add(self.vvar(t), -(u.p_start - u.p_up - u.p_min))
        return e

    def _ramp_dn_basic(self, t: int) -> LinExpr:
        u = self.u
        e = self.pvar(t - 1)
        e.add(self.pvar(t), -1.0)
        e.add(self.uvar(t - 1), -(u.p_down + u.p_min))
        e.add(self.uvar(t), u.p_min)
        e.add(self.wvar(t), -(u.p_shut - u.p_down - u.p_min))
        return e

    def rows_3p(self) -> None:
        u, uid, T = self.u, self.uid, self.T
        multi = u.t_on > 1
        # ramp classes: steep enough that the three-period rows tighten
        in_up = lt(u.p_shut - u.p_min, u.p_up)
        in_dn = lt(u.p_start - u.p_min, u.p_down)
        for t in range(1, T + 1):
            e = self.uvar(t).scaled(u.p_min)
            e.add(self.pvar(t), -1.0)
            self._row(f"pmin[{uid},{t}]", e, "<=", 0.0)
        e = self.pvar(T)
        e.add(self.uvar(T), -u.p_max)
        self._row(f"pmax[{uid},{T}]", e, "<=", 0.0)
        for t in range(1, T):
            if multi:
                e = self.pvar(t)
                e.add(self.uvar(t), -u.p_max)
                e.add(self.vvar(t), u.p_max - u.p_start)
                e.add(self.wvar(t + 1), u.p_max - u.p_shut)
                self._row(f"ub_b[{uid},{t}]", e, "<=", 0.0)
            else:
                e = self.pvar(t)
                e.add(self.uvar(t), -u.p_max)
                e.add(self.vvar(t), u.p_max - u.p_start)
                e.add(self.wvar(t + 1), _pos(u.p_start - u.p_shut))
                self._row(f"ub_g1[{uid},{t}]", e, "<=", 0.0)
                e = self.pvar(t)
                e.add(self.uvar(t), -u.p_max)
                e.add(self.wvar(t + 1), u.p_max - u.p_shut)
                e.add(self.vvar(t), _pos(u.p_shut - u.p_start))
                self._row(f"ub_g2[{uid},{t}]", e, "<=", 0.0)
        up_ts = (T,) if (multi and in_up) else range(1, T + 1)
        for t in up_ts:
            self._row(f"rup[{uid},{t}]", self._ramp_up_basic(t), "<=", 0.0)
        if multi and in_up:
            for t in range(1, T):
                e = self.pvar(t)
                e.add(self.pvar(t - 1), -1.0)
                e.add(self.uvar(t), -u.p_up)
                e.add(self.wvar(t), u.p_min)
                e.add(self.wvar(t + 1), u.p_up - u.p_shut + u.p_min)
                e.add(self.vvar(t), -(u.p_start - u.p_up))
                self._row(f"rupw[{uid},{t}]", e, "<=", 0.0)
        if multi and u.t_off > 1 and in_up:
            for t in range(1, T):
                e = self.pvar(t + 1)
                e.add(self.pvar(t - 1), -1.0)
                e.add(self.uvar(t + 1), -2.0 * u.p_up)
                e.add(self.wvar(t), u.p_min)
                e.add(self.wvar(t + 1), u.p_min)
                e.add(self.vvar(t), -(u.p_start - u.p_up))
                e.add(self.vvar(t + 1), -(u.p_start - 2.0 * u.p_up))
                self._row(f"rup2[{uid},{t}]", e, "<=", 0.0)
        dn_ts = (1,) if (multi and in_dn) else range(1, T + 1)
        for t in dn_ts:
            self._row(f"rdn[{uid},{t}]", self._ramp_dn_basic(t), "<=", 0.0)
        if multi and in_dn:
            for t in range(2, T + 1):
                e = self.pvar(t - 1)
                e.add(self.pvar(t), -1.0)
                e.add(self.uvar(t), -u.p_down)
                e.add(self.wvar(t), -u.p_shut)
                e.add(self.vvar(t - 1), u.p_down - u.p_start + u.p_min)
                e.add(self.vvar(t), u.p_down + u.p_min)
                self._row(f"rdnv[{uid},{t}]", e, "<=", 0.0)

    # ---- normalized three-binary kind -------------------------------

    def rows_3phd(self) -> None:
        nu, uid, T = self.nu, self.uid, self.T
        up, dn, st, sh = nu.pt_up, nu.pt_down, nu.pt_start, nu.pt_shut
        for t in range(1, T):
            e = self.vvar(t)
            e.add(self.wvar(t + 1), 1.0)
            e.add(self.uvar(t), -1.0)
            e.add(self.t3var(t), -1.0)
            self._row(f"t3a[{uid},{t}]", e, "<=", 0.0)
        if self.u.t_on == 1:
            for t in range(1, T):
                e = self.t3var(t)
                e.add(self.wvar(t + 1), -1.0)
                self._row(f"t3b[{uid},{t}]", e, "<=", 0.0)
            for t in range(1, T):
                e = self.t3var(t)
                e.add(self.vvar(t), -1.0)
                self._row(f"t3c[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t - 1)
            e.add(self.uvar(t - 1), -1.0)
            e.add(self.wvar(t), 1.0 - sh)
            e.add(self.wvar(t + 1), 1.0 - dn - sh)
            e.add(self.t3var(t), -(1.0 - dn - sh))
            self._row(f"ub31[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t)
            e.add(self.uvar(t), -1.0)
            e.add(self.vvar(t), 1.0 - st)
            e.add(self.wvar(t + 1), 1.0 - sh)
            e.add(self.t3var(t), -(1.0 - max(st, sh)))
            self._row(f"ub32[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t + 1)
            e.add(self.uvar(t + 1), -1.0)
            e.add(self.vvar(t), 1.0 - up - st)
            e.add(self.vvar(t + 1), 1.0 - st)
            e.add(self.t3var(t), -(1.0 - up - st))
            self._row(f"ub33[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t)
            e.add(self.ptvar(t - 1), -1.0)
            e.add(self.vvar(t), -(st - up))
            e.add(self.t3var(t), -(_pos(up - sh) - _pos(st - sh)))
            e.add(self.uvar(t), -up)
            e.add(self.wvar(t + 1), _pos(up - sh))
            self._row(f"rup31[{uid},{t}]", e, "<=", 0.0)
        if T >= 2:
            e = self.ptvar(T)
            e.add(self.ptvar(T - 1), -1.0)
            e.add(self.uvar(T), -up)
            e.add(self.vvar(T), -(st - up))
            self._row(f"rup32[{uid},{T - 1}]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t + 1)
            e.add(self.ptvar(t - 1), -1.0)
            e.add(self.uvar(t + 1), -2.0 * up)
            e.add(self.vvar(t), -(st - up))
            e.add(self.vvar(t + 1), -(st - 2.0 * up))
            e.add(self.t3var(t), -(up - st))
            self._row(f"rup33[{uid},{t}]", e, "<=", 0.0)
        if T >= 2:
            e = self.ptvar(0)
            e.add(self.ptvar(1), -1.0)
            e.add(self.uvar(0), -dn)
            e.add(self.wvar(1), -(sh - dn))
            self._row(f"rdn31[{uid},1]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t)
            e.add(self.ptvar(t + 1), -1.0)
            e.add(self.wvar(t + 1), -(sh - dn))
            e.add(self.t3var(t), -(_pos(dn - st) - _pos(sh - st)))
            e.add(self.uvar(t), -dn)
            e.add(self.vvar(t), _pos(dn - st))
            self._row(f"rdn32[{uid},{t}]", e, "<=", 0.0)
        for t in range(1, T):
            e = self.ptvar(t - 1)
            e.add(self.ptvar(t + 1), -1.0)
            e.add(self.uvar(t - 1), -2.0 * dn)
            e.add(self.wvar(t), -(sh - 2.0 * dn))
            e.add(self.wvar(t + 1), -(sh - dn))
            e.add(self.t3var(t), -(dn - sh))
            self._row(f"rdn33[{uid},{t}]", e, "<=", 0.0)

    # ---- interval kinds ---------------------------------------------

    def rows_mp1(self) -> None:
        u, uid, T, M = self.u, self.uid, self.T, self.M
        W, L = self.sb.w_lock, self.sb.l_lock
        for t in range(0, W + L + 1):
            self._row(f"init[{uid},{t}]", self.u_of(t), "=", float(u.u0))
        if u.t_on >= M:
            for t in range(W + 1, T + 1):
                e = LinExpr()
                for w in range(max(1, t - u.t_on + 1), t + 1):
                    e.add(self.v_of(w), 1.0)
                e.add(self.u_of(t), -1.0)
                self._row(f"minup[{uid},{t}]", e, "<=", 0.0)
        if u.t_off >= M:
            for t in range(L + 1, T + 1):
                e = LinExpr()
                for w in range(max(1, t - u.t_off + 1), t + 1):
                    e.add(self.w_of(w), 1.0)
                e.add(self.u_of(t), 1.0)
                self._row(f"mindn[{uid},{t}]", e, "<=", 1.0)
        self.rows_startup()
        last = T - M + 1
        for m in sorted(self.sets):
            A = self.sets[m]
            for t in range(m, A.end + 1):
                e = self._lift(packing_expr(A, u.t_off, t))
                self._row(f"pack[{uid},{m},{t}]", e, "<=", 1.0)
            if m < last:
                for tag, t, expr in consistency_rows(A, self.sets[m + 1]):
                    name = "consu" if tag == "u" else "consv"
                    self._row(f"{name}[{uid},{m},{t}]",
                              self._lift(expr), "=", 0.0)
            self.rows_window_bounds(m)

    def rows_mp_linked(self) -> None:
        """mp2: equality links between the binary space and every window's
        interval variables; mp3/mp-ti: box and pin rows for the eliminated
        boundary expressions instead."""
        uid = self.uid
        for m in sorted(self.sets):
            A = self.sets[m]
            if self.kind == "mp2":
                for t in range(m, A.end + 1):
                    e = self._lift(link_u(A, t))
                    e.add(self.uvar(t), -1.0)
                    self._row(f"linku[{uid},{m},{t}]", e, "=", 0.0)
                for t in range(m + 1, A.end + 1):
                    e = self._lift(link_v(A, t))
                    e.add(self.vvar(t), -1.0)
                    self._row(f"linkv[{uid},{m},{t}]", e, "=", 0.0)
                for t in range(m + 1, A.end + 1):
                    e = self._lift(link_w(A, t))
                    e.add(self.wvar(t), -1.0)
                    self._row(f"linkw[{uid},{m},{t}]", e, "=", 0.0)
            else:
                es = self.elim[m]
                for (h, k) in es.bounded:
                    if h != m and k != A.end:
                        continue
                    e = self._lift(es.solved[(h, k)])
                    self._row(f"boxu[{uid},{m},{h},{k}]", e, "<=", 1.0)
                    e = self._lift(es.solved[(h, k)])
                    self._row(f"boxl[{uid},{m},{h},{k}]", e, ">=", 0.0)
                for (h, k) in es.absent:
                    e = self._lift(es.solved[(h, k)])
                    self._row(f"fix0[{uid},{m},{h},{k}]", e, "=", 0.0)
            self.rows_window_bounds(m)

    def rows_window_bounds(self, m: int) -> None:
        """Generation bounds and two-period ramp limits of one window,
        written on the interval variables."""
        A = self.sets[m]
        uid, T, M, nu = self.uid, self.T, self.M, self.nu
        end = A.end
        hist = self._history_window(m)
        tau = self._tau_expr(m)
        mode = self.ramp_mode
        common = dict(m=m, M=M, nu=nu, t_on=self.u.t_on, t_off=self.u.t_off,
                      u_run=self.sb.u_run, k_run=self.sb.k_run)
        for t in range(max(1, m), end + 1):
            if mode != "all" and not facet_predicate(
                    FacetQuery(kind="gen_ub", t=t, history=hist, **common)):
                continue
            e = self.ptvar(t)
            for (h, k) in A.intervals:
                if h <= t <= k:
                    c = ub_power((h, k), t, nu, m, M, history=hist)
                    if c:
                        e.add(tau(h, k), -c)
            self._row(f"ub[{uid},{m},{t}]", e, "<=", 0.0)
        if hist:
            for t in range(max(1, m), end + 1):
                if mode != "all" and not facet_predicate(
                        FacetQuery(kind="lb", t=t, history=True, **common)):
                    continue
                e = self.ptvar(t).scaled(-1.0)
                for (h, k) in A.intervals:
                    if h == m and t <= k:
                        c = lb_power((h, k), t, nu, m, M)
                        if c:
                            e.add(tau(h, k), c)
                self._row(f"lb[{uid},{m},{t}]", e, "<=", 0.0)
        for t in range(m + 1, end + 1):
            for a in range(1, t - m + 1):
                if not self._keep_ramp("up", m, t, a, hist, common):
                    continue
                e = self.ptvar(t)
                e.add(self.ptvar(t - a), -1.0)
                self._add_ramp_terms(e, A, tau, t, a, "up", hist)
                self._row(f"rup[{uid},{m},{t},{a}]", e, "<=", 0.0)
        for t in range(m + 1, end + 1):
            for a in range(1, t - m + 1):
                if not self._keep_ramp("down", m, t, a, hist, common):
                    continue
                e = self.ptvar(t - a)
                e.add(self.ptvar(t), -1.0)
                self._add_ramp_terms(e, A, tau, t, a, "down", hist)
                self._row(f"rdn[{uid},{m},{t},{a}]", e, "<=", 0.0)

    def _keep_ramp(self, direction: str, m: int, t: int, a: int,
                   hist: bool, common: dict) -> bool:
        mode = self.ramp_mode
        if mode == "model":
            end = m + self.M - 1
            if direction == "up" and not (m == self.T - self.M + 1
                                          or a == t - m):
                return False
            if direction == "down" and not (m == 0 or t == end):
                return False
        if mode == "all":
            return True
        kind = "ramp_up" if direction == "up" else "ramp_down"
        return facet_predicate(
            FacetQuery(kind=kind, t=t, a=a, history=hist, **common))

    def _add_ramp_terms(self, e: LinExpr, A: IntervalSet, tau, t: int,
                        a: int, direction: str, hist: bool) -> None:
        for (h, k) in A.intervals:
            if h <= t <= k or h <= t - a <= k:
                c = ub_ramp((h, k), t, a, self.nu, A.m, self.M,
                            direction, history=hist)
                if c:
                    e.add(tau(h, k), -c)

    # ---- dispatch ----------------------------------------------------

    def emit_rows(self) -> None:
        if self.kind == "mp1":
            self.rows_mp1()
            return
        self.rows_logic_core()
        self.rows_startup()
        if self.kind == "2p":
            self.rows_2p()
        elif self.kind == "3p":
            self.rows_3p()
        elif self.kind == "3p-hd":
            self.rows_3phd()
        else:
            self.rows_mp_linked()


def build_formulation(inst: UCInstance, kind: str, windows=None,
                      ramp_rows: str = "model") -> Formulation:
    """Assemble one model kind for an instance.

    windows: window width for the interval kinds; an int applies to every
    unit, a dict maps unit ids, None picks each unit's default width.
    ramp_rows: see RAMP_MODES.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    if ramp_rows not in RAMP_MODES:
        raise ValueError(f"unknown ramp-row mode {ramp_rows!r}")
    T = inst.T
    f = Formulation(kind=kind)
    winmap = _resolve_windows(inst, windows) if kind in INTERVAL_KINDS else {}
    ctxs = [_UnitCtx(f, u, kind, T, winmap.get(u.id), ramp_rows)
            for u in inst.units]
    for c in ctxs:
        c.declare()
    obj = f.objective
    for c in ctxs:
        mw = c.kind in ("2p", "3p")
        for t in range(1, T + 1):
            if mw:
                obj.add(c.uvar(t), c.u.alpha)
                obj.add(c.pvar(t), c.u.beta)
                if c.u.gamma:
                    pid = c._vid("p", t)
                    f.quad_objective.append((pid, pid, c.u.gamma))
                    f.quad_domain[pid] = (c.u.p_min, c.u.p_max)
            else:
                obj.add(c.u_of(t), c.nu.at)
                obj.add(c.ptvar(t), c.nu.bt)
                if c.nu.gt:
                    pid = c._vid("pt", t)
                    f.quad_objective.append((pid, pid, c.nu.gt))
                    f.quad_domain[pid] = (0.0, 1.0)
                obj.add(c.v_of(t), c.u.c_hot)
            obj.add(c.svar(t), 1.0)
    for t in range(1, T + 1):
        bal = LinExpr()
        res = LinExpr()
        for c in ctxs:
            if c.kind in ("2p", "3p"):
                bal.add(c.pvar(t))
            else:
                bal.add(c.ptvar(t), c.u.p_max - c.u.p_min)
                bal.add(c.u_of(t), c.u.p_min)
            res.add(c.u_of(t), c.u.p_max)
        f.add_row(f"bal[{t}]", bal, "=", inst.demand[t - 1])
        f.add_row(f"res[{t}]", res, ">=",
                  inst.demand[t - 1] + inst.reserve[t - 1])
    for c in ctxs:
        c.emit_rows()
    return f


def piecewise_linearize(f: Formulation, pieces: int) -> Formulation:
    """Replace each quadratic cost term c*x^2 by a variable z supported
    from below by pieces+1 tangents on the term's domain.

    The result underestimates the true cost by at most c*(d/(2*pieces))^2
    per term, d being the domain width.
    """
    if pieces < 1:
        raise ValueError("pieces must be >= 1")
    g = Formulation(kind=f.kind)
    for v in f.variables.values():
        g.add_var(v)
    for r in f.rows:
        g.add_row(r.name, r.expr.copy(), r.sense, r.rhs)
    obj = f.objective.copy()
    for (v1, v2, c) in f.quad_objective:
        if v1 != v2:
            raise ValueError("piecewise linearization needs separable "
                             "quadratic terms")
        lo, hi = f.quad_domain.get(
            v1, (f.variables[v1].lower, f.variables[v1].upper))
        zid = f"z[{v1}]"
        g.add_var(Variable(zid, "z", 0.0, math.inf))
        obj.add_term(zid, 1.0)
        for seg in range(pieces + 1):
            xl = lo + (hi - lo) * seg / pieces
            e = LinExpr.var(v1, 2.0 * c * xl)
            e.add_term(zid, -1.0)
            g.add_row(f"pw[{v1},{seg}]", e, "<=", c * xl * xl)
    g.objective = obj
    return g
