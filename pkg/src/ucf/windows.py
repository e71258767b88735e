"""Sliding-window interval sets and their linear link expressions.

A window covers periods [m, m+M-1]; an interval [h, k] inside it stands for
"the unit is on exactly over [h, k] within this window", with the adjacency
at the window borders (h = m, k = m+M-1) left uncommitted.  Interval
variables are keyed by the abstract id ("tau", m, h, k).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .expr import LinExpr


class Interval(NamedTuple):
    h: int
    k: int


@dataclass(frozen=True)
class IntervalSet:
    """Feasible on-intervals of one window.

    history_mode is "none", "offline" (lock = remaining forced-off periods)
    or "online" (lock = minimum initial-run length u_run).
    """

    m: int
    M: int
    t_on: int
    intervals: tuple[Interval, ...]
    history_mode: str = "none"
    lock: int = 0

    @property
    def end(self) -> int:
        return self.m + self.M - 1

    def tau_id(self, h: int, k: int):
        return ("tau", self.m, h, k)

    def __contains__(self, hk) -> bool:
        return Interval(*hk) in set(self.intervals)


def feasible_intervals(m: int, M: int, T: int, t_on: int,
                       history: str = "none", sb=None, t_off: int = 1) -> IntervalSet:
    """Enumerate the feasible on-intervals of window [m, m+M-1].

    history: "none" ignores pre-horizon status; "offline"/"online" restrict
    starts and initial-interval lengths using the locks in sb (a
    StatusBounds; offline uses l_lock, online uses u_run together with the
    unit's t_off for the earliest fresh start).
    """
    if M < 2 or M > T + 1:
        raise ValueError(f"window length M={M} outside [2, T+1]")
    if not 0 <= m <= T - M + 1:
        raise ValueError(f"window start m={m} outside [0, T-M+1]")
    if t_on < 1:
        raise ValueError("t_on must be >= 1")
    end = m + M - 1
    out: list[Interval] = []
    lock = 0
    if history == "none":
        out.extend(Interval(m, k) for k in range(m, end + 1))
        first_h = m + 1
    elif history == "offline":
        lock = sb.l_lock
        if m >= lock + 1:
            k_lo = min(max(m, lock + t_on), end)
            out.extend(Interval(m, k) for k in range(k_lo, end + 1))
        first_h = max(m + 1, lock + 1)
    elif history == "online":
        lock = sb.u_run
        k_lo = min(max(m, lock), end)
        out.extend(Interval(m, k) for k in range(k_lo, end + 1))
        first_h = max(m + 1, lock + t_off + 1)
    else:
        raise ValueError(f"unknown history mode {history!r}")
    for h in range(first_h, end + 1):
        for k in range(min(h + t_on - 1, end), end + 1):
            out.append(Interval(h, k))
    return IntervalSet(m=m, M=M, t_on=t_on, intervals=tuple(sorted(out)),
                       history_mode=history, lock=lock)


def link_u(A: IntervalSet, t: int) -> LinExpr:
    """Commitment at period t as a sum of covering interval variables."""
    if not A.m <= t <= A.end:
        raise ValueError(f"t={t} outside window [{A.m}, {A.end}]")
    e = LinExpr()
    for h, k in A.intervals:
        if h <= t <= k:
            e.add_term(A.tau_id(h, k), 1)
    return e


def link_v(A: IntervalSet, t: int) -> LinExpr:
    """Startup at period t: intervals beginning there.  Needs t >= m+1."""
    if not A.m + 1 <= t <= A.end:
        raise ValueError(f"startup link needs t in [{A.m + 1}, {A.end}], got {t}")
    e = LinExpr()
    for h, k in A.intervals:
        if h == t:
            e.add_term(A.tau_id(h, k), 1)
    return e


def link_w(A: IntervalSet, t: int) -> LinExpr:
    """Shutdown at period t: intervals ending at t-1.  Needs t >= m+1."""
    if not A.m + 1 <= t <= A.end:
        raise ValueError(f"shutdown link needs t in [{A.m + 1}, {A.end}], got {t}")
    e = LinExpr()
    for h, k in A.intervals:
        if k == t - 1:
            e.add_term(A.tau_id(h, k), 1)
    return e


def packing_expr(A: IntervalSet, t_off: int, t: int) -> LinExpr:
    """LHS of the at-most-one row at period t: intervals whose on-span padded
    by t_off forced-off periods covers t."""
    if not A.m <= t <= A.end:
        raise ValueError(f"t={t} outside window [{A.m}, {A.end}]")
    e = LinExpr()
    for h, k in A.intervals:
        if h <= t <= k + t_off:
            e.add_term(A.tau_id(h, k), 1)
    return e


def initial_equality(A: IntervalSet) -> LinExpr:
    """LHS of the online-history row: exactly one initial interval is active.
    Valid for windows with m <= min(u_run, T-M+1)."""
    e = LinExpr()
    for h, k in A.intervals:
        if h == A.m:
            e.add_term(A.tau_id(h, k), 1)
    return e


def consistency_rows(A: IntervalSet, B: IntervalSet):
    """Cross-window agreement rows between window m and window m+1.

    Yields (name, expr) with expr = link_m(t) - link_{m+1}(t); commitment
    rows cover t in [m+1, m+M-1], startup rows t in [m+2, m+M-1].  The
    shutdown-link analogue is implied by these and is not emitted.
    """
    if B.m != A.m + 1 or B.M != A.M:
        raise ValueError("consistency needs adjacent windows of equal length")
    for t in range(A.m + 1, A.end + 1):
        e = link_u(A, t)
        e.add(link_u(B, t), -1)
        yield ("u", t, e)
    for t in range(A.m + 2, A.end + 1):
        e = link_v(A, t)
        e.add(link_v(B, t), -1)
        yield ("v", t, e)


def compatible(a: Interval, b: Interval, t_off: int) -> bool:
    """True when two intervals of one window can both be active: the later
    start clears the earlier end by more than t_off off periods."""
    first, second = (a, b) if a.h <= b.h else (b, a)
    return second.h > first.k + t_off


def schedule_tau(A: IntervalSet, on_periods) -> dict:
    """Definitional interval values for a 0/1 window schedule.

    on_periods is the set of on periods within [m, m+M-1]; returns the dict
    {(h,k): 1} over the maximal runs.  Raises if a run is not a member of A
    (the schedule is then infeasible for this interval set).
    """
    runs = []
    t = A.m
    while t <= A.end:
        if t in on_periods:
            h = t
            while t + 1 <= A.end and t + 1 in on_periods:
                t += 1
            runs.append(Interval(h, t))
        t += 1
    members = set(A.intervals)
    for r in runs:
        if r not in members:
            raise ValueError(f"run {tuple(r)} not a feasible interval of window {A.m}")
    return {(r.h, r.k): 1 for r in runs}


def count_model_size(M: int, T: int, t_on: int = 1) -> dict:
    """Closed-form size of the full interval model over all T-M+2 windows.

    n_tau_unrestricted ignores the minimum-up filter; n_tau applies it.
    ub_rows counts generation upper-bound rows (none for period 0);
    ramp_rows counts both ramp directions over every (window, t, a).
    """
    if M < 2 or M > T + 1:
        raise ValueError(f"window length M={M} outside [2, T+1]")
    wins = T - M + 2
    extra = max(0, M - t_on - 1) * (M - t_on) // 2
    return {
        "windows": wins,
        "n_tau_unrestricted": M * (M + 1) * wins // 2,
        "n_tau": (2 * M - 1 + extra) * wins,
        "ub_rows": M * wins - 1,
        "ramp_rows": M * (M - 1) * wins,
    }
