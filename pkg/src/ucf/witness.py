"""Catalogued feasible points of the window polytopes.

Each family (A1..A57) is a closed-form recipe for one feasible point of a
window polytope, parameterized by a handful of period indices (r0..r4), a
ramp span a, a ramp bound value pt_ramp and a perturbation eps.  The
families exist to certify facets: assemblies of them are tight at one bound
row and affinely span its face.

Families referencing U describe windows still tied to an initial on-run and
need an online IntervalSet; eps defaults to 1/64 and is halved (at most ten
times) until the point is feasible.
"""
from __future__ import annotations

from fractions import Fraction
from types import SimpleNamespace

from .instance import UCFError
from .polylab import Polytope, _frac

ZERO = Fraction(0)
ONE = Fraction(1)

_FAMILIES: dict[str, tuple] = {}


def _family(fid, needs=(), eps=False, history=False):
    def reg(fn):
        _FAMILIES[fid] = (fn, tuple(needs), eps, history)
        return fn
    return reg


def _chk(cond, msg):
    if not cond:
        raise ValueError(msg)


def _pos(x):
    return x if x > 0 else ZERO


def _ratio(num, den):
    # slope helper: every use multiplies by a max(0, span) factor that is
    # zero whenever the denominator is, so 0 is the right degenerate value
    return num / den if den else ZERO


class _Ctx:
    """Window data a family formula reads: borders, initial-run length and
    the normalized unit levels."""

    def __init__(self, p: Polytope):
        self.p = p
        self.m = p.A.m
        self.end = p.A.end
        self.M = p.A.M
        nu = p.nu
        self.up, self.dn = _frac(nu.pt_up), _frac(nu.pt_down)
        self.st, self.sh = _frac(nu.pt_start), _frac(nu.pt_shut)
        self.p0 = _frac(nu.pt0)
        self.U = p.A.lock if p.A.history_mode == "online" else None

    def need_interval(self, h, k):
        _chk((h, k) in self.p.A, f"[{h},{k}] is not a feasible interval")

    def need_U(self):
        _chk(self.U is not None, "family needs an online initial run")
        _chk(self.m <= self.U <= self.end, "initial run leaves the window")
        self.need_interval(self.m, self.U)
        return self.U


def _initial_decline(c: _Ctx):
    return {(c.m, c.U): {r: _pos(c.p0 - r * c.dn)
                         for r in range(c.m, c.U + 1)}}


def _tent(lo, hi, r3, peak, lslope, rslope):
    return {r: peak - _pos(r3 - r) * lslope - _pos(r - r3) * rslope
            for r in range(lo, hi + 1)}


def _merge(*segments):
    taus = set()
    power: dict[int, Fraction] = {}
    for seg in segments:
        for hk, prof in seg.items():
            taus.add(hk)
            power.update(prof)
    return taus, power


# --- the catalogue --------------------------------------------------------

@_family("A1")
def _a1(c, q):
    return set(), {}


@_family("A2")
def _a2(c, q):
    c.need_interval(c.m, c.end)
    return {(c.m, c.end)}, {r: ONE for r in range(c.m, c.end + 1)}


@_family("A3", needs=("r1", "r2"))
def _a3(c, q):
    c.need_interval(q.r1, q.r2)
    return {(q.r1, q.r2)}, {r: ZERO for r in range(q.r1, q.r2 + 1)}


@_family("A4", needs=("r1", "r2", "r0"), eps=True)
def _a4(c, q):
    taus, power = _a3(c, q)
    _chk(q.r1 <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = q.eps
    return taus, power


@_family("A5", needs=("r1", "r2"), history=True)
def _a5(c, q):
    c.need_U()
    taus, power = _merge(_initial_decline(c))
    t2, p2 = _a3(c, q)
    return taus | t2, {**power, **p2}


@_family("A6", needs=("r1", "r2", "r0"), eps=True, history=True)
def _a6(c, q):
    taus, power = _a5(c, q)
    _chk(q.r1 <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = q.eps
    return taus, power


def _peak7(c, q):
    return min(ONE, c.sh + (q.r2 - q.r3) * c.dn)


@_family("A7", needs=("r2", "r3"))
def _a7(c, q):
    c.need_interval(c.m, q.r2)
    _chk(c.m <= q.r3 <= q.r2, "peak outside the committed interval")
    peak = _peak7(c, q)
    prof = _tent(c.m, q.r2, q.r3, peak, ZERO,
                 _ratio(_pos(peak - c.sh), q.r2 - q.r3))
    return {(c.m, q.r2)}, prof


def _peak8(c, q):
    return min(ONE, c.p0 + q.r3 * c.up, c.sh + (q.r2 - q.r3) * c.dn)


@_family("A8", needs=("r2", "r3"))
def _a8(c, q):
    c.need_interval(c.m, q.r2)
    _chk(c.m <= q.r3 <= q.r2, "peak outside the committed interval")
    peak = _peak8(c, q)
    prof = _tent(c.m, q.r2, q.r3, peak, _ratio(peak - c.p0, q.r3),
                 _ratio(_pos(peak - c.sh), q.r2 - q.r3))
    return {(c.m, q.r2)}, prof


@_family("A9", needs=("r2", "r3", "r0"), eps=True)
def _a9(c, q):
    taus, power = _a8(c, q)
    _chk(c.m <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A10", needs=("r1", "r2"))
def _a10(c, q):
    c.need_interval(c.m, q.r2)
    _chk(c.m <= q.r1 <= q.r2, "kink outside the committed interval")
    power = {r: _pos(c.p0 - r * c.dn) for r in range(c.m, q.r1 + 1)}
    knee = _pos(c.p0 - q.r1 * c.dn)
    slope = _ratio(_pos(knee - c.sh), q.r2 - q.r1)
    for r in range(q.r1, q.r2 + 1):
        power[r] = knee - (r - q.r1) * slope
    return {(c.m, q.r2)}, power


@_family("A11", needs=("r1", "r2", "r0"), eps=True)
def _a11(c, q):
    taus, power = _a10(c, q)
    _chk(c.m <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


def _peak12(c, q):
    return min(ONE, c.st + (q.r3 - q.r1) * c.up,
               c.sh + (q.r2 - q.r3) * c.dn)


def _tent12(c, q):
    peak = _peak12(c, q)
    return _tent(q.r1, q.r2, q.r3, peak,
                 _ratio(_pos(peak - c.st), q.r3 - q.r1),
                 _ratio(_pos(peak - c.sh), q.r2 - q.r3))


@_family("A12", needs=("r1", "r2", "r3"))
def _a12(c, q):
    c.need_interval(q.r1, q.r2)
    _chk(q.r1 <= q.r3 <= q.r2, "peak outside the committed interval")
    return {(q.r1, q.r2)}, _tent12(c, q)


@_family("A13", needs=("r1", "r2", "r3", "r0"), eps=True)
def _a13(c, q):
    taus, power = _a12(c, q)
    _chk(q.r1 <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A14", needs=("r1", "r2", "r3"), history=True)
def _a14(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a12(c, q)
    return t1 | t2, {**p1, **p2}


@_family("A15", needs=("r1", "r2", "r3", "r0"), eps=True, history=True)
def _a15(c, q):
    taus, power = _a14(c, q)
    _chk(q.r1 <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


def _initial_tent(c, r3):
    U = c.need_U()
    peak = min(ONE, c.p0 + r3 * c.up, c.sh + (U - r3) * c.dn)
    return {(c.m, U): _tent(c.m, U, r3, peak, _ratio(peak - c.p0, r3),
                            _ratio(_pos(peak - c.sh), U - r3))}


@_family("A16", needs=("r1", "r2", "r3", "r4"), history=True)
def _a16(c, q):
    _chk(c.m <= q.r3 <= c.need_U(), "initial peak outside the run")
    t1, p1 = _merge(_initial_tent(c, q.r3))
    c.need_interval(q.r1, q.r2)
    _chk(q.r1 <= q.r4 <= q.r2, "peak outside the committed interval")
    q2 = SimpleNamespace(r1=q.r1, r2=q.r2, r3=q.r4)
    return t1 | {(q.r1, q.r2)}, {**p1, **_tent12(c, q2)}


@_family("A17", needs=("r1", "r2", "r3"), history=True)
def _a17(c, q):
    _chk(c.m <= q.r3 <= c.need_U(), "initial peak outside the run")
    t1, p1 = _merge(_initial_tent(c, q.r3))
    t2, p2 = _a3(c, q)
    return t1 | t2, {**p1, **p2}


def _peak18(c, q):
    return min(ONE, c.st + (q.r3 - q.r1) * c.up)


@_family("A18", needs=("r1", "r3"))
def _a18(c, q):
    c.need_interval(q.r1, c.end)
    _chk(q.r1 <= q.r3 <= c.end, "peak outside the committed interval")
    peak = _peak18(c, q)
    prof = _tent(q.r1, c.end, q.r3, peak,
                 _ratio(_pos(peak - c.st), q.r3 - q.r1), ZERO)
    return {(q.r1, c.end)}, prof


@_family("A19", needs=("r1", "r3", "r0"), eps=True)
def _a19(c, q):
    taus, power = _a18(c, q)
    _chk(q.r1 <= q.r0 <= c.end, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A20", needs=("r1", "r3"), history=True)
def _a20(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a18(c, q)
    return t1 | t2, {**p1, **p2}


@_family("A21", needs=("r1", "r3", "r0"), eps=True, history=True)
def _a21(c, q):
    taus, power = _a20(c, q)
    _chk(q.r1 <= q.r0 <= c.end, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A22", needs=("r3",))
def _a22(c, q):
    c.need_interval(c.m, c.end)
    _chk(c.m <= q.r3 <= c.end, "peak outside the window")
    peak = min(ONE, c.p0 + q.r3 * c.up)
    prof = _tent(c.m, c.end, q.r3, peak, _ratio(peak - c.p0, q.r3), ZERO)
    return {(c.m, c.end)}, prof


@_family("A23", needs=("r3", "r0"), eps=True)
def _a23(c, q):
    taus, power = _a22(c, q)
    _chk(c.m <= q.r0 <= c.end, "r0 outside the window")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A24", needs=("r3",))
def _a24(c, q):
    c.need_interval(c.m, c.end)
    prof = {r: _pos(ONE - _pos(q.r3 - r) * c.up)
            for r in range(c.m, c.end + 1)}
    return {(c.m, c.end)}, prof


@_family("A25", needs=("r3",), eps=True)
def _a25(c, q):
    c.need_interval(c.m, c.end)
    prof = {r: _pos(ONE - _pos(q.r3 - r) * c.up - q.eps)
            for r in range(c.m, c.end + 1)}
    return {(c.m, c.end)}, prof


@_family("A26", needs=("r3",))
def _a26(c, q):
    c.need_interval(c.m, c.end)
    prof = {r: _pos(ONE - _pos(r - q.r3) * c.dn)
            for r in range(c.m, c.end + 1)}
    return {(c.m, c.end)}, prof


@_family("A27", needs=("r3",), eps=True)
def _a27(c, q):
    c.need_interval(c.m, c.end)
    prof = {r: _pos(ONE - _pos(r - q.r3) * c.dn - q.eps)
            for r in range(c.m, c.end + 1)}
    return {(c.m, c.end)}, prof


def _tent28(c, q):
    """Peak at r3, ramp-limited left leg down to r4, regular legs outside."""
    peak = _peak12(c, q)
    power = {}
    rslope = _ratio(_pos(peak - c.sh), q.r2 - q.r3)
    for r in range(q.r4, q.r2 + 1):
        power[r] = (peak - _pos(q.r3 - r) * q.pt_ramp / q.a
                    - _pos(r - q.r3) * rslope)
    lslope = _ratio(_pos(power[q.r4] - c.st), q.r4 - q.r1)
    for r in range(q.r1, q.r4):
        power[r] = power[q.r4] - (q.r4 - r) * lslope
    return power


@_family("A28", needs=("r1", "r2", "r3", "r4", "a", "pt_ramp"))
def _a28(c, q):
    c.need_interval(q.r1, q.r2)
    _chk(q.r1 <= q.r4 <= q.r3 <= q.r2, "need r1 <= r4 <= r3 <= r2")
    _chk(q.a >= 1, "ramp span must be positive")
    return {(q.r1, q.r2)}, _tent28(c, q)


@_family("A29", needs=("r1", "r2", "r3", "r4", "a", "pt_ramp"), history=True)
def _a29(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a28(c, q)
    return t1 | t2, {**p1, **p2}


def _tent30(c, q):
    """Peak at r3, ramp-limited right leg down to r4, regular legs outside."""
    peak = _peak12(c, q)
    power = {}
    lslope = _ratio(_pos(peak - c.st), q.r3 - q.r1)
    for r in range(q.r1, q.r4 + 1):
        power[r] = (peak - _pos(r - q.r3) * q.pt_ramp / q.a
                    - _pos(q.r3 - r) * lslope)
    rslope = _ratio(_pos(power[q.r4] - c.sh), q.r2 - q.r4)
    for r in range(q.r4 + 1, q.r2 + 1):
        power[r] = power[q.r4] - (r - q.r4) * rslope
    return power


@_family("A30", needs=("r1", "r2", "r3", "r4", "a", "pt_ramp"))
def _a30(c, q):
    c.need_interval(q.r1, q.r2)
    _chk(q.r1 <= q.r3 <= q.r4 <= q.r2, "need r1 <= r3 <= r4 <= r2")
    _chk(q.a >= 1, "ramp span must be positive")
    return {(q.r1, q.r2)}, _tent30(c, q)


@_family("A31", needs=("r1", "r2", "r3", "r4", "a", "pt_ramp"), history=True)
def _a31(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a30(c, q)
    return t1 | t2, {**p1, **p2}


def _prof32(c, q, peak):
    return {r: _pos(peak - _pos(q.r3 - r) * q.pt_ramp / q.a)
            for r in range(q.r1, c.end + 1)}


@_family("A32", needs=("r1", "r3", "r4", "a", "pt_ramp"))
def _a32(c, q):
    c.need_interval(q.r1, c.end)
    _chk(q.r1 <= q.r3 <= c.end, "peak outside the committed interval")
    _chk(q.a >= 1, "ramp span must be positive")
    return {(q.r1, c.end)}, _prof32(c, q, _peak18(c, q))


@_family("A33", needs=("r1", "r3", "r4", "a", "pt_ramp"), eps=True)
def _a33(c, q):
    c.need_interval(q.r1, c.end)
    _chk(q.r1 <= q.r3 <= c.end, "peak outside the committed interval")
    return {(q.r1, c.end)}, _prof32(c, q, _peak18(c, q) - q.eps)


@_family("A34", needs=("r1", "r3", "r4", "a", "pt_ramp"), history=True)
def _a34(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a32(c, q)
    return t1 | t2, {**p1, **p2}


@_family("A35", needs=("r1", "r3", "r4", "a", "pt_ramp"), eps=True,
         history=True)
def _a35(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a33(c, q)
    return t1 | t2, {**p1, **p2}


def _prof36(c, q, peak):
    power = {r: _pos(peak - _pos(r - q.r3) * q.pt_ramp / q.a)
             for r in range(q.r3, c.end + 1)}
    lslope = _ratio(_pos(peak - c.st), q.r3 - q.r1)
    for r in range(q.r1, q.r3):
        power[r] = peak - (q.r3 - r) * lslope
    return power


@_family("A36", needs=("r1", "r3", "a", "pt_ramp"))
def _a36(c, q):
    c.need_interval(q.r1, c.end)
    _chk(q.r1 <= q.r3 <= c.end, "peak outside the committed interval")
    return {(q.r1, c.end)}, _prof36(c, q, _peak18(c, q))


@_family("A37", needs=("r1", "r3", "a", "pt_ramp"), eps=True)
def _a37(c, q):
    c.need_interval(q.r1, c.end)
    _chk(q.r1 <= q.r3 <= c.end, "peak outside the committed interval")
    return {(q.r1, c.end)}, _prof36(c, q, _peak18(c, q) - q.eps)


@_family("A38", needs=("r1", "r3", "a", "pt_ramp"), history=True)
def _a38(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a36(c, q)
    return t1 | t2, {**p1, **p2}


@_family("A39", needs=("r1", "r3", "a", "pt_ramp"), eps=True, history=True)
def _a39(c, q):
    c.need_U()
    t1, p1 = _merge(_initial_decline(c))
    t2, p2 = _a37(c, q)
    return t1 | t2, {**p1, **p2}


@_family("A40", needs=("r2", "r3", "r4", "a", "pt_ramp"))
def _a40(c, q):
    c.need_interval(c.m, q.r2)
    _chk(c.m <= q.r3 <= q.r4 <= q.r2, "need m <= r3 <= r4 <= r2")
    peak = _peak7(c, q)
    power = {r: peak - _pos(r - q.r3) * q.pt_ramp / q.a
             for r in range(c.m, q.r4 + 1)}
    rslope = _ratio(_pos(power[q.r4] - c.sh), q.r2 - q.r4)
    for r in range(q.r4 + 1, q.r2 + 1):
        power[r] = power[q.r4] - (r - q.r4) * rslope
    return {(c.m, q.r2)}, power


def _prof41(c, q):
    peak = _peak8(c, q)
    power = {}
    rslope = _ratio(_pos(peak - c.sh), q.r2 - q.r3)
    for r in range(q.r4, q.r2 + 1):
        power[r] = (peak - _pos(q.r3 - r) * q.pt_ramp / q.a
                    - _pos(r - q.r3) * rslope)
    line = _ratio(c.p0 - power[q.r4], q.r4)
    for r in range(c.m, q.r4):
        power[r] = c.p0 - r * line
    return power


@_family("A41", needs=("r2", "r3", "r4", "a", "pt_ramp"))
def _a41(c, q):
    c.need_interval(c.m, q.r2)
    _chk(c.m <= q.r4 <= q.r3 <= q.r2, "need m <= r4 <= r3 <= r2")
    return {(c.m, q.r2)}, _prof41(c, q)


@_family("A42", needs=("r2", "r3", "r4", "a", "pt_ramp", "r0"), eps=True)
def _a42(c, q):
    taus, power = _a41(c, q)
    _chk(q.r4 < q.r0 <= q.r2, "r0 must sit past the ramp kink")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A43", needs=("r2", "r3", "a", "pt_ramp"))
def _a43(c, q):
    c.need_interval(c.m, q.r2)
    _chk(c.m <= q.r3 <= q.r2, "peak outside the committed interval")
    peak = _peak8(c, q)
    power = {q.r3: peak}
    for r in range(q.r3 + 1, c.end + 1):
        power[r] = _pos(peak - (r - q.r3) * q.pt_ramp / q.a)
    line = _ratio(c.p0 - peak, q.r3)
    for r in range(c.m, q.r3):
        power[r] = c.p0 - r * line
    return {(c.m, q.r2)}, power


def _prof44(c, q, peak):
    power = {r: peak - _pos(q.r3 - r) * q.pt_ramp / q.a
             for r in range(q.r4, c.end + 1)}
    line = _ratio(c.p0 - power[q.r4], q.r4)
    for r in range(c.m, q.r4):
        power[r] = c.p0 - r * line
    return power


@_family("A44", needs=("r3", "r4", "a", "pt_ramp"))
def _a44(c, q):
    c.need_interval(c.m, c.end)
    _chk(c.m <= q.r4 <= q.r3 <= c.end, "need m <= r4 <= r3 <= end")
    peak = min(ONE, c.p0 + q.r3 * c.up)
    return {(c.m, c.end)}, _prof44(c, q, peak)


@_family("A45", needs=("r3", "r4", "a", "pt_ramp", "r0"), eps=True)
def _a45(c, q):
    taus, power = _a44(c, q)
    _chk(q.r4 < q.r0 <= c.end, "r0 must sit past the ramp kink")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A46", needs=("r3", "r4", "a", "pt_ramp"), eps=True)
def _a46(c, q):
    c.need_interval(c.m, c.end)
    _chk(c.m <= q.r4 <= q.r3 <= c.end, "need m <= r4 <= r3 <= end")
    peak = min(ONE, c.p0 + q.r3 * c.up) - q.eps
    return {(c.m, c.end)}, _prof44(c, q, peak)


@_family("A47", needs=("r3", "r4", "a", "pt_ramp", "r0"), eps=True)
def _a47(c, q):
    taus, power = _a46(c, q)
    _chk((q.r4 < q.r0 <= c.end or c.m <= q.r0 < q.r4) and q.r0 != q.r4,
         "r0 must avoid the ramp kink")
    power[q.r0] = power[q.r0] - q.eps
    return taus, power


@_family("A48", needs=("r1", "r2", "r3", "r4", "a", "pt_ramp"), history=True)
def _a48(c, q):
    U = c.need_U()
    _chk(c.m <= q.r4 <= q.r3 <= U, "need m <= r4 <= r3 <= U")
    peak = min(ONE, c.p0 + q.r3 * c.up, c.sh + (U - q.r3) * c.dn)
    power = {}
    rslope = _ratio(_pos(peak - c.sh), U - q.r3)
    for r in range(q.r4, U + 1):
        power[r] = (peak - _pos(q.r3 - r) * q.pt_ramp / q.a
                    - _pos(r - q.r3) * rslope)
    line = _ratio(c.p0 - power[q.r4], q.r4)
    for r in range(c.m, q.r4):
        power[r] = c.p0 - r * line
    t2, p2 = _a3(c, q)
    return {(c.m, U)} | t2, {**power, **p2}


@_family("A49", needs=("r1", "r2", "r3", "a", "pt_ramp"), history=True)
def _a49(c, q):
    U = c.need_U()
    _chk(c.m <= q.r3 <= U, "peak outside the initial run")
    peak = min(ONE, c.p0 + q.r3 * c.up, c.sh + (U - q.r3) * c.dn)
    power = {r: _pos(peak - (r - q.r3) * q.pt_ramp / q.a)
             for r in range(q.r3, U + 1)}
    line = _ratio(c.p0 - peak, q.r3)
    for r in range(c.m, q.r3):
        power[r] = c.p0 - r * line
    t2, p2 = _a3(c, q)
    return {(c.m, U)} | t2, {**power, **p2}


def _prof50(c, q, peak):
    power = {q.r3: peak}
    for r in range(q.r3 + 1, q.r4 + 1):
        power[r] = _pos(peak - (r - q.r3) * q.pt_ramp / q.a)
    for r in range(q.r4 + 1, c.end + 1):
        power[r] = power[q.r4]
    line = _ratio(c.p0 - peak, q.r3)
    for r in range(c.m, q.r3):
        power[r] = c.p0 - r * line
    return power


@_family("A50", needs=("r3", "r4", "a", "pt_ramp"))
def _a50(c, q):
    c.need_interval(c.m, c.end)
    _chk(c.m <= q.r3 <= q.r4 <= c.end, "need m <= r3 <= r4 <= end")
    peak = min(ONE, c.p0 + q.r3 * c.up)
    return {(c.m, c.end)}, _prof50(c, q, peak)


@_family("A51", needs=("r3", "r4", "a", "pt_ramp", "r0"), eps=True)
def _a51(c, q):
    taus, power = _a50(c, q)
    _chk(q.r3 < q.r0 <= c.end and q.r0 != q.r4, "r0 must sit past the peak")
    power[q.r0] = power[q.r0] + q.eps
    return taus, power


@_family("A52", needs=("r3", "r4", "a", "pt_ramp"), eps=True)
def _a52(c, q):
    c.need_interval(c.m, c.end)
    _chk(c.m <= q.r3 <= q.r4 <= c.end, "need m <= r3 <= r4 <= end")
    peak = min(ONE, c.p0 + q.r3 * c.up) - q.eps
    return {(c.m, c.end)}, _prof50(c, q, peak)


@_family("A53", needs=("r3", "r4", "a", "pt_ramp", "r0"), eps=True)
def _a53(c, q):
    taus, power = _a52(c, q)
    _chk(c.m <= q.r0 < q.r3, "r0 must precede the peak")
    power[q.r0] = power[q.r0] - q.eps
    return taus, power


def _prof54(c, q):
    low = _pos(c.p0 - q.r3 * c.dn)
    rise = _ratio(c.p0 - low, q.r3)
    return {r: low + _pos(q.r3 - r) * rise for r in range(c.m, c.end + 1)}


@_family("A54", needs=("r3",))
def _a54(c, q):
    c.need_interval(c.m, c.end)
    _chk(c.m <= q.r3 <= c.end, "kink outside the window")
    return {(c.m, c.end)}, _prof54(c, q)


@_family("A55", needs=("r3", "r0"), eps=True)
def _a55(c, q):
    taus, power = _a54(c, q)
    _chk(c.m <= q.r0 <= c.end, "r0 outside the window")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


@_family("A56", needs=("r2",))
def _a56(c, q):
    c.need_interval(c.m, q.r2)
    slope = _ratio(_pos(c.p0 - c.sh), q.r2)
    return {(c.m, q.r2)}, {r: c.p0 - r * slope
                           for r in range(c.m, q.r2 + 1)}


@_family("A57", needs=("r2", "r0"), eps=True)
def _a57(c, q):
    taus, power = _a56(c, q)
    _chk(c.m <= q.r0 <= q.r2, "r0 outside the committed interval")
    power[q.r0] = abs(power[q.r0] - q.eps)
    return taus, power


# --- assembly and the public entry point ----------------------------------

FAMILY_IDS = tuple(sorted(_FAMILIES, key=lambda s: int(s[1:])))


def family_signature(family: str):
    """(needed params, uses eps, needs online history) for one family."""
    if family not in _FAMILIES:
        raise ValueError(f"unknown point family {family!r}")
    _, needs, eps, history = _FAMILIES[family]
    return needs, eps, history


def _build_point(p: Polytope, taus, power) -> tuple:
    vec = [ZERO] * p.dim_ambient
    for h, k in taus:
        vec[p.coord_index(p.A.tau_id(h, k))] = ONE
    for t, val in power.items():
        if ("pt", t) not in p.coords:
            raise ValueError(f"polytope spec {p.spec} has no power "
                             f"coordinate for period {t}")
        vec[p.coord_index(("pt", t))] = val
    return tuple(vec)


def witness_points(family: str, p: Polytope, *, r0=None, r1=None, r2=None,
                   r3=None, r4=None, a=None, pt_ramp=None, eps=None) -> list:
    """Instantiate one catalogued point family on a window polytope.

    Index parameters must satisfy the family's stated ranges (ValueError
    otherwise).  For perturbation families eps defaults to 1/64 and is
    halved until the point is feasible, at most ten times; a point that
    stays infeasible raises UCFError since the formulas are supposed to be
    feasible by construction.
    """
    fn, needs, wants_eps, _ = _FAMILIES.get(family) or (None,) * 4
    if fn is None:
        raise ValueError(f"unknown point family {family!r}")
    given = {"r0": r0, "r1": r1, "r2": r2, "r3": r3, "r4": r4, "a": a,
             "pt_ramp": pt_ramp}
    for name in needs:
        if given[name] is None:
            raise ValueError(f"family {family} needs parameter {name}")
    q = SimpleNamespace(**{k: (_frac(v) if k == "pt_ramp" and v is not None
                               else v) for k, v in given.items()})
    c = _Ctx(p)
    if not wants_eps:
        taus, power = fn(c, q)
        point = _build_point(p, taus, power)
        if not p.feasible(point):
            raise UCFError(f"family {family} produced an infeasible point; "
                           "check the parameter choice against the formula")
        return [point]
    trials = [_frac(eps)] if eps is not None else \
        [Fraction(1, 64 * 2 ** i) for i in range(11)]
    for e in trials:
        q.eps = e
        taus, power = fn(c, q)
        point = _build_point(p, taus, power)
        if p.feasible(point):
            return [point]
    raise UCFError(f"family {family} stayed infeasible after shrinking eps; "
                   "check the parameter choice against the formula")


# --- facet certificates: points cited by the facet arguments --------------

PROP_FAMILIES = {
    "gen_ub": ("A1", "A2", "A3", "A4", "A7", "A12", "A18"),
    "ramp_up": ("A1", "A3", "A4", "A12", "A18", "A24", "A25", "A28", "A32"),
    "ramp_down": ("A1", "A3", "A4", "A7", "A12", "A26", "A27", "A30",
                  "A40"),
}


def _try(points, family, p, **kw):
    try:
        points.extend(witness_points(family, p, **kw))
    except (ValueError, UCFError):
        pass


def _flank_pairs(points, p, lo, hi):
    """A3 on [lo,hi] plus one eps bump per interior period."""
    if lo <= hi:
        _try(points, "A3", p, r1=lo, r2=hi)
        for j in range(lo, hi + 1):
            _try(points, "A4", p, r1=lo, r2=hi, r0=j)


def tight_assembly(p: Polytope, kind: str, t: int, a: int | None = None):
    """Candidate points, drawn from the cited families, for the facet
    certificate of one bound row: generation UB at t, or the span-a ramp
    row at t.  Callers filter for tightness before rank computation."""
    m, end = p.A.m, p.A.end
    pts: list = []
    _try(pts, "A1", p)
    if kind == "gen_ub":
        _flank_pairs(pts, p, m, t - 1)
        _flank_pairs(pts, p, t + 1, end)
        for h, k in p.A.intervals:
            if not h <= t <= k:
                _try(pts, "A3", p, r1=h, r2=k)
            elif h == m and k == end:
                _try(pts, "A2", p)
            elif h == m:
                _try(pts, "A7", p, r2=k, r3=t)
            elif k == end:
                _try(pts, "A18", p, r1=h, r3=t)
            else:
                _try(pts, "A12", p, r1=h, r2=k, r3=t)
        return pts
    up = _frac(p.nu.pt_up)
    dn = _frac(p.nu.pt_down)
    sh = _frac(p.nu.pt_shut)
    st = _frac(p.nu.pt_start)
    if kind == "ramp_up":
        _flank_pairs(pts, p, m, t - 1)
        _flank_pairs(pts, p, t + 1, end)
        for h, k in p.A.intervals:
            if not h <= t <= k:
                _try(pts, "A3", p, r1=h, r2=k)
            elif h == m and k == end:
                _try(pts, "A24", p, r3=t)
                _try(pts, "A25", p, r3=t)
            elif h <= t - a:
                if k < end:
                    ramp = min(ONE, a * up, sh + (k - t) * dn)
                    _try(pts, "A28", p, r1=h, r2=k, r3=t, r4=t - a, a=a,
                         pt_ramp=ramp)
                else:
                    _try(pts, "A32", p, r1=h, r3=t, r4=t - a, a=a,
                         pt_ramp=min(ONE, a * up))
            elif k < end:
                _try(pts, "A12", p, r1=h, r2=k, r3=t)
            else:
                _try(pts, "A18", p, r1=h, r3=t)
        return pts
    if kind == "ramp_down":
        ta = t - a
        _flank_pairs(pts, p, m, ta - 1)
        _flank_pairs(pts, p, ta + 1, end)
        for h, k in p.A.intervals:
            if not h <= ta <= k:
                _try(pts, "A3", p, r1=h, r2=k)
            elif h == m and k == end:
                _try(pts, "A26", p, r3=ta)
                _try(pts, "A27", p, r3=ta)
            elif h > m and k >= t:
                ramp = min(ONE, st + (ta - h) * up, a * dn)
                _try(pts, "A30", p, r1=h, r2=k, r3=ta, r4=t, a=a,
                     pt_ramp=ramp)
            elif h == m and k >= t:
                _try(pts, "A40", p, r2=k, r3=ta, r4=t, a=a,
                     pt_ramp=min(ONE, a * dn))
            elif h > m:
                _try(pts, "A12", p, r1=h, r2=k, r3=ta)
            else:
                _try(pts, "A7", p, r2=k, r3=ta)
        return pts
    raise ValueError(f"unknown assembly kind {kind!r}")
