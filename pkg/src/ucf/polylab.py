"""Exact-arithmetic laboratory for the single-window polytopes.

Builds the window relaxations over rationals, enumerates their vertices,
computes affine dimensions and classifies candidate inequalities as
facet / valid / redundant / invalid.  Every verdict is exact: unit data is
converted to Fraction on entry and no float ever touches the geometry.

Point layout: interval variables first (in the IntervalSet order), then one
normalized-power coordinate per window period.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .bounds import lb_power, ub_power, ub_ramp
from .instance import NormalizedUnit, UCFError
from .windows import Interval, IntervalSet, compatible, packing_expr

POLYTOPE_SPECS = ("B", "P", "Q", "B~", "P~", "Q~")

# combinatorial guards: window length for build, ambient dimension for
# exhaustive vertex enumeration
WINDOW_GUARD = 5
DIM_GUARD = 12

ZERO = Fraction(0)
ONE = Fraction(1)

Point = tuple  # tuple[Fraction, ...]
VertexSet = tuple  # tuple[Point, ...]


class GuardError(UCFError):
    """A combinatorial guard (window length or dimension) was exceeded."""


def _frac(x) -> Fraction:
    """Exact rational from int, Fraction or float (binary-exact)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(*x.as_integer_ratio())


def _frac_unit(nu: NormalizedUnit) -> NormalizedUnit:
    return NormalizedUnit(
        pt_up=_frac(nu.pt_up), pt_down=_frac(nu.pt_down),
        pt_start=_frac(nu.pt_start), pt_shut=_frac(nu.pt_shut),
        pt0=_frac(nu.pt0), at=_frac(nu.at), bt=_frac(nu.bt), gt=_frac(nu.gt),
    )


@dataclass(frozen=True)
class PolyRow:
    """One defining row: coefs . x  (sense)  rhs, all rational."""

    name: str
    coefs: tuple
    sense: str  # "<=", ">=" or "="
    rhs: Fraction

    def value(self, pt: Point) -> Fraction:
        return sum((c * x for c, x in zip(self.coefs, pt) if c), ZERO)

    def satisfied(self, pt: Point) -> bool:
        v = self.value(pt)
        if self.sense == "<=":
            return v <= self.rhs
        if self.sense == ">=":
            return v >= self.rhs
        return v == self.rhs

    def tight(self, pt: Point) -> bool:
        return self.value(pt) == self.rhs


@dataclass
class Polytope:
    """A single-window polytope in [0,1]^d with rational rows."""

    spec: str
    A: IntervalSet
    nu: NormalizedUnit
    t_off: int
    coords: tuple
    rows: list
    n_tau: int
    history: bool
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim_ambient(self) -> int:
        return len(self.coords)

    def coord_index(self, cid) -> int:
        return self.coords.index(cid)

    def feasible(self, pt: Point) -> bool:
        return (all(ZERO <= x <= ONE for x in pt)
                and all(r.satisfied(pt) for r in self.rows))


def build_polytope(spec: str, A: IntervalSet, nu: NormalizedUnit, sb=None,
                   t_off: int = 1) -> Polytope:
    """Assemble one of the six window polytopes over exact rationals.

    spec "B"/"P"/"Q" stack packing, then generation upper bounds, then ramp
    rows; the "~" variants use the history-aware coefficient tables and, for
    windows still tied to an initial on-run, add the one-active-initial-
    interval equality and the power lower-bound rows.
    """
    if spec not in POLYTOPE_SPECS:
        raise ValueError(f"unknown polytope spec {spec!r}")
    if A.M > WINDOW_GUARD:
        raise GuardError(f"window length {A.M} exceeds guard {WINDOW_GUARD}")
    nu = _frac_unit(nu)
    m, M, end = A.m, A.M, A.end
    tilde = spec.endswith("~")
    history = tilde and A.history_mode == "online" and A.m <= A.lock
    taus = list(A.intervals)
    coords = [A.tau_id(h, k) for h, k in taus]
    with_power = spec[0] in ("P", "Q")
    if with_power:
        coords.extend(("pt", t) for t in range(m, end + 1))
    coords = tuple(coords)
    index = {cid: i for i, cid in enumerate(coords)}
    d = len(coords)

    def dense(tau_terms, pt_terms=()):
        vec = [ZERO] * d
        for cid, c in tau_terms:
            vec[index[cid]] += _frac(c)
        for t, c in pt_terms:
            vec[index[("pt", t)]] += _frac(c)
        return tuple(vec)

    rows: list[PolyRow] = []
    for t in range(m, end + 1):
        e = packing_expr(A, t_off, t)
        rows.append(PolyRow(f"pack[{t}]", dense(e.terms.items()), "<=", ONE))
    if history:
        init = [(A.tau_id(h, k), ONE) for h, k in taus if h == m]
        rows.append(PolyRow("one", dense(init), "=", ONE))

    if with_power:
        for t in range(m, end + 1):
            terms = [(A.tau_id(h, k), -ub_power((h, k), t, nu, m, M, history))
                     for h, k in taus if h <= t <= k]
            rows.append(PolyRow(f"ub[{t}]", dense(terms, [(t, ONE)]), "<=", ZERO))
        if history:
            for t in range(m, end + 1):
                terms = [(A.tau_id(h, k), lb_power((h, k), t, nu, m, M))
                         for h, k in taus if h == m and t <= k]
                terms = [(cid, c) for cid, c in terms if c]
                if terms:
                    rows.append(PolyRow(f"lb[{t}]", dense(terms, [(t, -ONE)]),
                                        "<=", ZERO))
    if spec[0] == "Q":
        for t in range(m + 1, end + 1):
            for a in range(1, t - m + 1):
                for direction, sign, tag in (("up", ONE, "rup"),
                                             ("down", -ONE, "rdn")):
                    terms = []
                    for h, k in taus:
                        if h <= t <= k or h <= t - a <= k:
                            c = ub_ramp((h, k), t, a, nu, m, M, direction,
                                        history)
                            if c:
                                terms.append((A.tau_id(h, k), -_frac(c)))
                    vec = dense(terms, [(t, sign), (t - a, -sign)])
                    rows.append(PolyRow(f"{tag}[{t},{a}]", vec, "<=", ZERO))
    return Polytope(spec=spec, A=A, nu=nu, t_off=t_off, coords=coords,
                    rows=rows, n_tau=len(taus), history=history)


# --- exact vertex enumeration -------------------------------------------

def _as_le(rows: Iterable[PolyRow]):
    """Flatten rows to <= halfspaces; equalities first so the dimension
    drops before the expensive inequality insertions."""
    eqs, ineqs = [], []
    for r in rows:
        neg = tuple(-c for c in r.coefs)
        if r.sense == "<=":
            ineqs.append((r.coefs, r.rhs))
        elif r.sense == ">=":
            ineqs.append((neg, -r.rhs))
        else:
            eqs.append((r.coefs, r.rhs))
            eqs.append((neg, -r.rhs))
    ineqs.sort(key=lambda cr: -sum(1 for c in cr[0] if c))
    return eqs + ineqs


def _restricted_rank(vectors, free, target) -> int:
    """Rank of the vectors restricted to the free coordinates, capped at
    target (early exit)."""
    basis: list[list[Fraction]] = []
    for vec in vectors:
        row = [vec[j] for j in free]
        for b in basis:
            piv = next((i for i, x in enumerate(b) if x), None)
            if piv is not None and row[piv]:
                f = row[piv] / b[piv]
                row = [x - f * y for x, y in zip(row, b)]
        if any(row):
            basis.append(row)
            if len(basis) >= target:
                break
    return len(basis)


def _vertex_hull(d: int, halfspaces) -> list[Point]:
    """All vertices of [0,1]^d cut by the given <=-halfspaces, exactly.

    Incremental insertion: keep the current vertex set, split it against
    each new halfspace, and generate the cut points of edges that cross.
    A pair of vertices spans an edge iff their common tight constraints
    (box facets plus inserted rows) have rank d-1.
    """
    n_rows = len(halfspaces)

    def full_mask(pt, upto):
        mask = 0
        for j, x in enumerate(pt):
            if x == ZERO:
                mask |= 1 << (2 * j)
            elif x == ONE:
                mask |= 1 << (2 * j + 1)
        for i in range(upto):
            vec, rhs = halfspaces[i]
            if sum((c * x for c, x in zip(vec, pt) if c), ZERO) == rhs:
                mask |= 1 << (2 * d + i)
        return mask

    pts: dict[Point, int] = {}
    for code in range(1 << d):
        pt = tuple(ONE if code >> j & 1 else ZERO for j in range(d))
        pts[pt] = full_mask(pt, 0)

    for i, (vec, rhs) in enumerate(halfspaces):
        bit = 1 << (2 * d + i)
        strict, tight, cut = [], [], []
        for pt, mask in pts.items():
            v = sum((c * x for c, x in zip(vec, pt) if c), ZERO)
            if v < rhs:
                strict.append((pt, mask, v))
            elif v == rhs:
                tight.append((pt, mask | bit))
            else:
                cut.append((pt, mask, v))
        nxt: dict[Point, int] = {pt: mask for pt, mask, _ in strict}
        nxt.update(tight)
        for pu, mu, vu in strict:
            for pw, mw, vw in cut:
                common = mu & mw
                if common.bit_count() < d - 1:
                    continue
                free = [j for j in range(d)
                        if not common >> (2 * j) & 3]
                pinned = d - len(free)
                if pinned > d - 1:
                    continue
                shared = [halfspaces[k][0] for k in range(i)
                          if common >> (2 * d + k) & 1]
                if pinned + _restricted_rank(shared, free, d - 1 - pinned) \
                        < d - 1:
                    continue
                t = (rhs - vu) / (vw - vu)
                x = tuple(a + t * (b - a) for a, b in zip(pu, pw))
                if x not in nxt:
                    nxt[x] = full_mask(x, i + 1)
        pts = nxt
        if not pts:
            break
    return sorted(pts)


def enumerate_vertices(p: Polytope, dim_guard: int = DIM_GUARD) -> VertexSet:
    """Every vertex of the polytope, exact and deduplicated."""
    if p.dim_ambient > dim_guard:
        raise GuardError(
            f"dimension {p.dim_ambient} exceeds guard {dim_guard}")
    key = ("vertices", dim_guard)
    if key not in p._cache:
        p._cache[key] = tuple(_vertex_hull(p.dim_ambient, _as_le(p.rows)))
    return p._cache[key]


def polytope_dim(vs: Sequence[Point]) -> int:
    """Affine rank of a point set (count of affinely independent points
    minus one)."""
    if not vs:
        raise ValueError("empty vertex set has no dimension")
    return _affine_rank(vs)


def _affine_rank(points: Sequence[Point]) -> int:
    it = iter(points)
    base = next(it)
    d = len(base)
    diffs = [tuple(x - b for x, b in zip(pt, base)) for pt in it]
    return _restricted_rank(diffs, range(d), d)


# --- integer-side candidate points ---------------------------------------

def _integral_assignments(p: Polytope):
    """All 0/1 interval selections compatible with the packing rows (and the
    initial-interval equality when present)."""
    taus = list(p.A.intervals)
    out: list[tuple[int, ...]] = []

    def grow(idx, chosen):
        if idx == len(taus):
            out.append(tuple(chosen))
            return
        grow(idx + 1, chosen + [0])
        cand = taus[idx]
        if all(not c or compatible(taus[j], cand, p.t_off)
               for j, c in enumerate(chosen)):
            grow(idx + 1, chosen + [1])

    grow(0, [])
    if p.history:
        first = [i for i, hk in enumerate(taus) if hk.h == p.A.m]
        out = [a for a in out if sum(a[i] for i in first) == 1]
    return out


def _hull_points(p: Polytope) -> list[Point]:
    """Vertex candidates of the integer hull: each feasible 0/1 interval
    selection crossed with the vertices of its power slice."""
    if "hull" in p._cache:
        return p._cache["hull"]
    n_pt = p.dim_ambient - p.n_tau
    points: list[Point] = []
    for assign in _integral_assignments(p):
        tau_part = tuple(Fraction(a) for a in assign)
        if n_pt == 0:
            points.append(tau_part)
            continue
        slice_rows = []
        for r in p.rows:
            power = r.coefs[p.n_tau:]
            if not any(power):
                continue
            shift = sum((c * x for c, x in zip(r.coefs, tau_part) if c), ZERO)
            slice_rows.append(PolyRow(r.name, power, r.sense, r.rhs - shift))
        for v in _vertex_hull(n_pt, _as_le(slice_rows)):
            points.append(tau_part + v)
    p._cache["hull"] = points
    return points


# --- facet verdicts -------------------------------------------------------

@dataclass(frozen=True)
class FacetReport:
    """Classification of one inequality against a window polytope.

    Verdicts: "invalid" (cuts an integer-side point), "facet" (valid and
    tight on a dim-1 face), "redundant" (valid, proven implied: dropping the
    row leaves the relaxation's vertex set unchanged), "valid_non_facet"
    (valid, neither of the above established).  full_dimensional flags
    whether the integer hull spans the ambient space; when it does not, the
    facet verdict is relative to the computed dimension.
    """

    valid: bool
    tight_count: int
    affine_rank_tight: int
    polytope_dim: int
    verdict: str
    full_dimensional: bool


def _to_row(ineq) -> PolyRow:
    if isinstance(ineq, PolyRow):
        return ineq
    coefs, sense, rhs = ineq
    return PolyRow("ineq", tuple(_frac(c) for c in coefs), sense, _frac(rhs))


def verify_facet(p: Polytope, ineq, dim_guard: int = DIM_GUARD) -> FacetReport:
    """Classify an inequality against the integer side of the polytope.

    Validity, tightness and rank are measured on the integer-hull candidate
    points.  The redundancy probe re-enumerates the relaxation without the
    row and is attempted only within the dimension guard; when skipped, a
    non-facet valid row reports "valid_non_facet".
    """
    row = _to_row(ineq)
    hull = _hull_points(p)
    if not hull:
        raise GuardError("polytope has no integer-side points")
    dim = _affine_rank(hull)
    valid = all(row.satisfied(h) for h in hull)
    tight = [h for h in hull if row.tight(h)]
    rank_tight = _affine_rank(tight) if tight else -1
    if not valid:
        verdict = "invalid"
    elif rank_tight == dim - 1:
        verdict = "facet"
    elif _proven_redundant(p, row, dim_guard):
        verdict = "redundant"
    else:
        verdict = "valid_non_facet"
    return FacetReport(valid=valid, tight_count=len(tight),
                       affine_rank_tight=rank_tight, polytope_dim=dim,
                       verdict=verdict,
                       full_dimensional=dim == p.dim_ambient)


def _proven_redundant(p: Polytope, row: PolyRow, dim_guard: int) -> bool:
    if p.dim_ambient > dim_guard:
        return False
    keep = [r for r in p.rows
            if (r.coefs, r.sense, r.rhs) != (row.coefs, row.sense, row.rhs)]
    if len(keep) == len(p.rows):
        remaining = enumerate_vertices(p, dim_guard)
    else:
        remaining = _vertex_hull(p.dim_ambient, _as_le(keep))
    return all(row.satisfied(v) for v in remaining)


def verify_integral_hull(p: Polytope, binary_prefix: int,
                         dim_guard: int = DIM_GUARD) -> bool:
    """True iff every vertex of the relaxation is 0/1 in the first
    binary_prefix coordinates."""
    return all(all(x == ZERO or x == ONE for x in v[:binary_prefix])
               for v in enumerate_vertices(p, dim_guard))


def facet_report_lines(p: Polytope, names: Iterable[str] | None = None,
                       dim_guard: int = DIM_GUARD) -> Iterator[str]:
    """JSON line per bound row (generation and ramp rows by default)."""
    wanted = set(names) if names is not None else None
    for r in p.rows:
        if wanted is None:
            if not (r.name.startswith("ub") or r.name.startswith("lb")
                    or r.name.startswith("rup") or r.name.startswith("rdn")):
                continue
        elif r.name not in wanted:
            continue
        rep = verify_facet(p, r, dim_guard)
        yield json.dumps({
            "spec": p.spec, "m": p.A.m, "M": p.A.M, "row": r.name,
            "valid": rep.valid, "tight_count": rep.tight_count,
            "affine_rank_tight": rep.affine_rank_tight,
            "polytope_dim": rep.polytope_dim, "verdict": rep.verdict,
            "full_dimensional": rep.full_dimensional,
        }, sort_keys=True)
