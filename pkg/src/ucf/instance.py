"""Unit-commitment instance data: unit parameters, system series, normalization,
and initial-status bound computation."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ._num import snap_ceil, snap_floor


class UCFError(Exception):
    """Base class for errors raised by this package."""


class ParseError(UCFError):
    """Malformed instance file (bad JSON, wrong types)."""


class ValidationError(UCFError):
    """Instance violates schema or parameter invariants.

    Carries every violation found, not just the first.
    """

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


@dataclass(frozen=True)
class UnitParams:
    """Raw (MW-space) parameters of one generating unit.

    t0 is signed: +k means the unit has been online for k periods entering
    the horizon, -k means offline for k periods.  p0 is the power output in
    the period before the horizon; it is required when u0 = 1 and ignored
    otherwise.
    """

    id: str
    p_min: float
    p_max: float
    p_up: float
    p_down: float
    p_start: float
    p_shut: float
    t_on: int
    t_off: int
    t_cold: int
    alpha: float
    beta: float
    gamma: float
    c_hot: float
    c_cold: float
    u0: int
    t0: int
    p0: float | None = None

    def violations(self) -> list[str]:
        """Every invariant violation, prefixed with the unit id."""
        v = []
        e = f"unit {self.id!r}:"
        if not self.id:
            v.append("unit id must be a nonempty string")
            e = "unit <unnamed>:"
        if not (0 < self.p_min < self.p_max):
            v.append(f"{e} requires 0 < p_min < p_max, got [{self.p_min}, {self.p_max}]")
        if self.p_up <= 0 or self.p_down <= 0:
            v.append(f"{e} ramp rates must be positive")
        if not (self.p_min <= self.p_start <= self.p_max):
            v.append(f"{e} p_start must lie in [p_min, p_max]")
        if not (self.p_min <= self.p_shut <= self.p_max):
            v.append(f"{e} p_shut must lie in [p_min, p_max]")
        if self.t_on < 1 or self.t_off < 1:
            v.append(f"{e} t_on and t_off must be >= 1")
        if self.t_cold < 0:
            v.append(f"{e} t_cold must be >= 0")
        if self.gamma < 0:
            v.append(f"{e} gamma must be >= 0")
        if self.c_hot < 0 or self.c_cold < self.c_hot:
            v.append(f"{e} needs 0 <= c_hot <= c_cold")
        if self.u0 not in (0, 1):
            v.append(f"{e} u0 must be 0 or 1")
        elif self.u0 == 1:
            if self.t0 < 1:
                v.append(f"{e} u0=1 requires t0 >= 1 (periods online)")
            if self.p0 is None:
                v.append(f"{e} u0=1 requires p0")
            elif not (self.p_min <= self.p0 <= self.p_max):
                v.append(f"{e} p0 must lie in [p_min, p_max]")
        else:
            if self.t0 > -1:
                v.append(f"{e} u0=0 requires t0 <= -1 (periods offline)")
        return v

    def cost(self, p: float) -> float:
        """Production cost alpha + beta p + gamma p^2 at output p (unit on)."""
        return self.alpha + self.beta * p + self.gamma * p * p


@dataclass(frozen=True)
class NormalizedUnit:
    """Unit data mapped to the [0,1] power scale.

    Powers transform as pt = (p - p_min)/(p_max - p_min) for an online unit;
    cost coefficients transform so at + bt*pt + gt*pt^2 equals the MW-space
    cost at the corresponding output.
    """

    pt_up: float
    pt_down: float
    pt_start: float
    pt_shut: float
    pt0: float
    at: float
    bt: float
    gt: float

    def cost(self, pt: float) -> float:
        return self.at + self.bt * pt + self.gt * pt * pt


def normalize_unit(u: UnitParams) -> NormalizedUnit:
    """Map a unit's levels and cost coefficients to the [0,1] power scale."""
    span = u.p_max - u.p_min
    p0 = u.p0 if (u.u0 == 1 and u.p0 is not None) else u.p_min
    return NormalizedUnit(
        pt_up=u.p_up / span,
        pt_down=u.p_down / span,
        pt_start=(u.p_start - u.p_min) / span,
        pt_shut=(u.p_shut - u.p_min) / span,
        pt0=(p0 - u.p_min) / span if u.u0 == 1 else 0.0,
        at=u.alpha + u.beta * u.p_min + u.gamma * u.p_min * u.p_min,
        bt=span * (u.beta + 2.0 * u.gamma * u.p_min),
        gt=u.gamma * span * span,
    )


@dataclass(frozen=True)
class StatusBounds:
    """Horizon-clipped locks implied by the initial status.

    w_lock: first periods forced on by the remaining minimum-up time.
    l_lock: first periods forced off by the remaining minimum-down time.
    u_run:  minimum length of the initial on-run (ramp-down feasibility may
            extend it past w_lock).
    k_run:  the open variant of u_run; k_run - u_run is 0 or 1.
    """

    w_lock: int
    l_lock: int
    u_run: int
    k_run: int


def status_bounds(u: UnitParams, T: int) -> StatusBounds:
    """Compute initial-status locks over a T-period horizon."""
    if u.u0 == 1:
        w = max(0, min(T, u.t_on - u.t0))
        nu = normalize_unit(u)
        drop = nu.pt0 - nu.pt_shut
        ur = min(T, max(snap_ceil(max(0.0, drop) / nu.pt_down), u.t_on - u.t0))
        kr = min(T, max(max(0, snap_floor(drop / nu.pt_down) + 1), u.t_on - u.t0))
        return StatusBounds(w_lock=w, l_lock=0, u_run=ur, k_run=kr)
    l = max(0, min(T, u.t_off + u.t0))
    return StatusBounds(w_lock=0, l_lock=l, u_run=0, k_run=0)


def warm_start_flag(u: UnitParams, t: int) -> int:
    """1 when a startup at period t cannot be cold because of pre-horizon
    history, else 0."""
    lead = t - u.t_off - u.t_cold
    if lead > 0:
        return 0
    off_before = max(0, -u.t0)
    return 1 if off_before < abs(lead - 1) + 1 else 0


@dataclass(frozen=True)
class SystemSeries:
    """Demand and spinning-reserve requirement per period (1-based periods)."""

    demand: tuple[float, ...]
    reserve: tuple[float, ...]


@dataclass(frozen=True)
class UCInstance:
    T: int
    series: SystemSeries
    units: tuple[UnitParams, ...]

    @property
    def demand(self) -> tuple[float, ...]:
        return self.series.demand

    @property
    def reserve(self) -> tuple[float, ...]:
        return self.series.reserve


_TOP_KEYS = {"T", "demand", "reserve", "units"}
_UNIT_KEYS = {
    "id", "p_min", "p_max", "p_up", "p_down", "p_start", "p_shut",
    "t_on", "t_off", "t_cold", "alpha", "beta", "gamma", "c_hot", "c_cold",
    "u0", "t0", "p0",
}
_UNIT_FLOAT = ("p_min", "p_max", "p_up", "p_down", "p_start", "p_shut",
               "alpha", "beta", "gamma", "c_hot", "c_cold")
_UNIT_INT = ("t_on", "t_off", "t_cold", "u0", "t0")


def _num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _parse_unit(d: dict, idx: int, errs: list[str]) -> UnitParams | None:
    if not isinstance(d, dict):
        errs.append(f"units[{idx}]: expected an object")
        return None
    uid = d.get("id")
    tag = f"unit {uid!r}" if isinstance(uid, str) and uid else f"units[{idx}]"
    unknown = set(d) - _UNIT_KEYS
    if unknown:
        errs.append(f"{tag}: unknown keys {sorted(unknown)}")
    if not isinstance(uid, str) or not uid:
        errs.append(f"{tag}: 'id' must be a nonempty string")
        return None
    bad = False
    for k in _UNIT_FLOAT:
        if not _num(d.get(k)):
            errs.append(f"{tag}: '{k}' must be a number")
            bad = True
    for k in _UNIT_INT:
        val = d.get(k)
        if not isinstance(val, int) or isinstance(val, bool):
            errs.append(f"{tag}: '{k}' must be an integer")
            bad = True
    if "p0" in d and d["p0"] is not None and not _num(d["p0"]):
        errs.append(f"{tag}: 'p0' must be a number")
        bad = True
    if bad:
        return None
    return UnitParams(
        id=uid,
        p_min=float(d["p_min"]), p_max=float(d["p_max"]),
        p_up=float(d["p_up"]), p_down=float(d["p_down"]),
        p_start=float(d["p_start"]), p_shut=float(d["p_shut"]),
        t_on=d["t_on"], t_off=d["t_off"], t_cold=d["t_cold"],
        alpha=float(d["alpha"]), beta=float(d["beta"]), gamma=float(d["gamma"]),
        c_hot=float(d["c_hot"]), c_cold=float(d["c_cold"]),
        u0=d["u0"], t0=d["t0"],
        p0=float(d["p0"]) if _num(d.get("p0")) else None,
    )


def load_instance(source) -> UCInstance:
    """Load and validate an instance from a JSON file path or a parsed dict.

    Raises ParseError on malformed JSON and ValidationError (with every
    violation listed) on schema or invariant failures.
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read instance: {exc}") from exc
    elif isinstance(source, dict):
        data = source
    else:
        raise ParseError(f"unsupported instance source {type(source).__name__}")

    if not isinstance(data, dict):
        raise ParseError("instance root must be a JSON object")

    errs: list[str] = []
    unknown = set(data) - _TOP_KEYS
    if unknown:
        errs.append(f"unknown top-level keys {sorted(unknown)}")
    T = data.get("T")
    if not isinstance(T, int) or isinstance(T, bool) or T < 1:
        errs.append("'T' must be a positive integer")
        T = 0
    for key in ("demand", "reserve"):
        seq = data.get(key)
        if not isinstance(seq, list) or not all(_num(x) for x in seq):
            errs.append(f"'{key}' must be a list of numbers")
        elif T and len(seq) != T:
            errs.append(f"'{key}' must have length T={T}, got {len(seq)}")
        elif any(x < 0 for x in seq):
            errs.append(f"'{key}' entries must be >= 0")
    raw_units = data.get("units")
    units: list[UnitParams] = []
    if not isinstance(raw_units, list) or not raw_units:
        errs.append("'units' must be a nonempty list")
    else:
        for i, d in enumerate(raw_units):
            u = _parse_unit(d, i, errs)
            if u is not None:
                errs.extend(u.violations())
                units.append(u)
        ids = [u.id for u in units]
        for dup in sorted({i for i in ids if ids.count(i) > 1}):
            errs.append(f"duplicate unit id {dup!r}")
    if errs:
        raise ValidationError(errs)
    return UCInstance(
        T=T,
        series=SystemSeries(demand=tuple(float(x) for x in data["demand"]),
                            reserve=tuple(float(x) for x in data["reserve"])),
        units=tuple(units),
    )
