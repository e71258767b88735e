"""Interval coefficient tables and facet predicates.

Each table function returns the coefficient a single interval variable
contributes to a generation or ramp bound row.  The case analysis over the
interval's position relative to (t, the window borders) is total: positions
outside every case raise instead of silently returning something.

All functions accept float or Fraction unit data; strict comparisons in the
facet predicates go through a snap guard for floats and are exact for
Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass

from ._num import lt, snap_ceil
from .instance import NormalizedUnit


def _check_interval(h, k, t, m, M):
    end = m + M - 1
    if not (m <= h <= k <= end):
        raise ValueError(f"interval [{h},{k}] outside window [{m},{end}]")
    return end


def ub_power(hk, t: int, nu: NormalizedUnit, m: int, M: int,
             history: bool = False):
    """Upper-bound coefficient of interval hk for power at period t.

    history=True marks a window still tied to the initial on-run: rows with
    h = m then bound the continuation of that run via pt0.  Requires
    h <= t <= k.
    """
    h, k = hk
    end = _check_interval(h, k, t, m, M)
    if not h <= t <= k:
        raise ValueError(f"period {t} not covered by interval [{h},{k}]")
    if h > m:
        rise = nu.pt_start + (t - h) * nu.pt_up
        if k < end:
            return min(1, rise, nu.pt_shut + (k - t) * nu.pt_down)
        return min(1, rise)
    if history:
        rise = nu.pt0 + t * nu.pt_up
        if k < end:
            return min(1, rise, nu.pt_shut + (k - t) * nu.pt_down)
        return min(1, rise)
    if k < end:
        return min(1, nu.pt_shut + (k - t) * nu.pt_down)
    return 1


def lb_power(hk, t: int, nu: NormalizedUnit, m: int, M: int, u0: int = 1):
    """Lower-bound coefficient of the initial interval hk at period t
    (history windows of an online unit only)."""
    if u0 != 1:
        raise ValueError("power lower bounds need an initially online unit")
    h, k = hk
    _check_interval(h, k, t, m, M)
    if h != m:
        raise ValueError("lower bounds apply to initial intervals (h = m) only")
    if t > k:
        raise ValueError(f"period {t} past interval end {k}")
    return max(0, nu.pt0 - t * nu.pt_down)


def ub_ramp(hk, t: int, a: int, nu: NormalizedUnit, m: int, M: int,
            direction: str, history: bool = False):
    """Signed coefficient of interval hk in the ramp row bounding
    P(t) - P(t-a) (direction "up") or P(t-a) - P(t) ("down").

    Intervals covering neither t-a nor t are a caller error.  In history
    windows the h = m rows carry the initial-run bound; initial intervals
    covering only t-a contribute the negative of the period-(t-a) lower
    bound in the up direction.
    """
    h, k = hk
    end = _check_interval(h, k, t, m, M)
    if not (m + 1 <= t <= end and 1 <= a <= t - m):
        raise ValueError(f"bad ramp indices t={t}, a={a} for window [{m},{end}]")
    ta = t - a
    has_t = h <= t <= k
    has_ta = h <= ta <= k
    if not has_t and not has_ta:
        raise ValueError(f"interval [{h},{k}] covers neither {ta} nor {t}")

    if direction == "up":
        if history and h == m:
            lbta = max(0, nu.pt0 - ta * nu.pt_down)
            if k >= t:
                if k < end:
                    return min(a * nu.pt_up, 1 - lbta,
                               nu.pt_shut + (k - t) * nu.pt_down - lbta)
                return min(1 - lbta, a * nu.pt_up)
            return -lbta
        if not has_t:
            return 0
        if h <= ta:
            if k < end:
                return min(1, a * nu.pt_up, nu.pt_shut + (k - t) * nu.pt_down)
            return min(1, a * nu.pt_up)
        rise = nu.pt_start + (t - h) * nu.pt_up
        if k < end:
            return min(1, rise, nu.pt_shut + (k - t) * nu.pt_down)
        return min(1, rise)

    if direction == "down":
        if not has_ta:
            return 0
        if h == m:
            if history:
                rise = nu.pt0 + ta * nu.pt_up
                if k >= t:
                    return min(1, rise, a * nu.pt_down)
                return min(1, rise, nu.pt_shut + (k - t + a) * nu.pt_down)
            if k >= t:
                return min(1, a * nu.pt_down)
            return min(1, nu.pt_shut + (k - t + a) * nu.pt_down)
        rise = nu.pt_start + (ta - h) * nu.pt_up
        if k >= t:
            return min(1, rise, a * nu.pt_down)
        return min(1, rise, nu.pt_shut + (k - t + a) * nu.pt_down)

    raise ValueError(f"unknown ramp direction {direction!r}")


@dataclass(frozen=True)
class FacetQuery:
    """Which inequality of which window, plus the unit data deciding
    whether it supports a facet.

    kind: "gen_ub", "lb", "ramp_up" or "ramp_down"; a is the ramp span
    (None otherwise); history marks initial-run windows of an online unit
    (kind "lb" is history-only)."""

    kind: str
    t: int
    m: int
    M: int
    nu: NormalizedUnit
    a: int | None = None
    history: bool = False
    t_on: int = 1
    t_off: int = 1
    u_run: int = 0
    k_run: int = 0


def facet_predicate(q: FacetQuery) -> bool:
    """Closed-form facet test for one bound row of one window."""
    nu = q.nu
    up, dn, st, sh, p0 = nu.pt_up, nu.pt_down, nu.pt_start, nu.pt_shut, nu.pt0
    end = q.m + q.M - 1
    if q.kind == "gen_ub" and not q.history:
        return True
    if q.kind == "ramp_up" and not q.history:
        return lt(q.a * up, 1)
    if q.kind == "ramp_down" and not q.history:
        return lt(q.a * dn, 1)
    if q.kind == "lb":
        return (q.t == max(1, q.m)
                or q.k_run < q.t
                or lt(p0, q.t * dn))
    if q.kind == "gen_ub":
        K = q.k_run
        if q.t < max(1, q.m):
            # period 0 power is fixed by the initial condition; the row is
            # an implicit equality there, never a facet
            return False
        if q.t == max(1, q.m):
            return True
        if K < q.t or lt(1 - p0, q.t * up):
            return True
        return (K < end and q.t < end
                and lt(sh - p0, q.t * up)
                and lt(K * dn + sh - p0, q.t * (up + dn)))
    t, a, U, K = q.t, q.a, q.u_run, q.k_run
    s = t - U - q.t_off
    if q.kind == "ramp_up":
        m1 = (
            a == 1
            or t > K
            or lt(1, a * up)
            or lt(1 - p0 + t * dn, a * (up + dn))
            or (max(t, K) < end
                and (lt(sh + max(0, K - t) * dn, a * up)
                     or lt(sh + max(t, K) * dn - p0, a * (up + dn))))
            or (a <= s and (q.t_on < a or lt(1 - st, (a - 1) * up)))
            or (t < end and a <= s
                and lt(sh - st, (a - 1) * up)
                and lt((q.t_on - 1) * dn + sh - st, (a - 1) * (up + dn))
                and t + q.t_on - q.m - q.M + 1 < a)
        )
        m2 = (
            t - a == 0
            or (lt(a * up, 1) and lt(a * (up + dn), 1 - p0 + t * dn))
            or (lt(a * up, 1) and a < s)
        )
        return m1 and m2
    if q.kind == "ramp_down":
        m3 = (
            a == 1
            or a <= s
            or lt(1, a * dn)
            or lt(p0 + t * up, a * (up + dn))
            or (U < t and (lt(1 - sh, (a - 1) * dn)
                           or lt(p0 + t * up + dn - sh, a * (up + dn))))
        )
        m4 = (
            t - a == 0
            or (lt(a * dn, 1) and lt(a * (up + dn), p0 + t * up))
            or (lt(a * dn, 1) and a < s and lt(a * (up + dn), st + (s - 1) * up))
        )
        return m3 and m4
    raise ValueError(f"unknown facet query kind {q.kind!r}")


def redundancy_ratio(M: int, pt_up, pt_down) -> float:
    """Predicted fraction of ramp rows per window pair that the facet filter
    removes (both directions pooled)."""
    if M < 2:
        raise ValueError("window length must be >= 2")
    g1 = min(snap_ceil(1 / pt_up), M)
    g2 = min(snap_ceil(1 / pt_down), M)
    total = 2 * M * (M - 1)
    return (total - (g1 - 1) * (2 * M - g1) - (g2 - 1) * (2 * M - g2)) / total


def ramp_rows_kept(M: int, T: int, pt_up, pt_down) -> int:
    """Count of ramp rows (both directions, all windows) surviving the
    facet filter; complements count_model_size()["ramp_rows"]."""
    g1 = min(snap_ceil(1 / pt_up), M)
    g2 = min(snap_ceil(1 / pt_down), M)
    per_window = ((g1 - 1) * (2 * M - g1) + (g2 - 1) * (2 * M - g2)) // 2
    return per_window * (T - M + 2)
