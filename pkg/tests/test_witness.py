"""Catalogued polytope points and the facet certificates built from them."""
import re
from fractions import Fraction as Fr

import pytest

from ucf import (FAMILY_IDS, StatusBounds, UCFError, build_polytope,
                 enumerate_vertices, feasible_intervals, polytope_dim,
                 tight_assembly, witness_points)
from ucf.instance import NormalizedUnit
from ucf.witness import PROP_FAMILIES, family_signature


def mk_nu(up, dn, start, shut, p0=0.0):
    return NormalizedUnit(pt_up=up, pt_down=dn, pt_start=start, pt_shut=shut,
                          pt0=p0, at=0.0, bt=0.0, gt=0.0)


NU = mk_nu(0.25, 0.375, 0.125, 0.25)


@pytest.fixture(scope="module")
def q3():
    return build_polytope("Q", feasible_intervals(0, 3, 8, 1), NU)


def test_registry():
    assert len(FAMILY_IDS) == 57
    assert FAMILY_IDS[0] == "A1" and FAMILY_IDS[-1] == "A57"
    assert set(PROP_FAMILIES) == {"gen_ub", "ramp_up", "ramp_down"}
    for fams in PROP_FAMILIES.values():
        assert set(fams) <= set(FAMILY_IDS)


def test_family_signature():
    assert family_signature("A1") == ((), False, False)
    assert family_signature("A4") == (("r1", "r2", "r0"), True, False)
    assert family_signature("A5") == (("r1", "r2"), False, True)
    assert family_signature("A28") == (("r1", "r2", "r3", "r4", "a",
                                        "pt_ramp"), False, False)
    with pytest.raises(ValueError):
        family_signature("A99")


def test_frozen_points(q3):
    # coords: tau (0,0),(0,1),(0,2),(1,1),(1,2),(2,2) then pt0,pt1,pt2
    assert witness_points("A1", q3) == [(0,) * 9]
    assert witness_points("A2", q3) == [(0, 0, 1, 0, 0, 0, 1, 1, 1)]
    assert witness_points("A3", q3, r1=1, r2=2) == \
        [(0, 0, 0, 0, 1, 0, 0, 0, 0)]
    assert witness_points("A4", q3, r1=1, r2=2, r0=1) == \
        [(0, 0, 0, 0, 1, 0, 0, Fr(1, 64), 0)]
    assert witness_points("A12", q3, r1=0, r2=2, r3=1) == \
        [(0, 0, 1, 0, 0, 0, Fr(1, 8), Fr(3, 8), Fr(1, 4))]


def test_points_are_feasible(q3):
    for pt in (witness_points("A2", q3)
               + witness_points("A12", q3, r1=0, r2=2, r3=2)
               + witness_points("A18", q3, r1=1, r3=2)):
        assert q3.feasible(pt)


def test_parameter_validation(q3):
    with pytest.raises(ValueError, match="needs parameter"):
        witness_points("A3", q3)
    with pytest.raises(ValueError, match="not a feasible interval"):
        witness_points("A3", q3, r1=2, r2=1)
    with pytest.raises(ValueError, match="unknown point family"):
        witness_points("A99", q3)
    with pytest.raises(ValueError, match="no power coordinate"):
        witness_points("A2", build_polytope(
            "B", feasible_intervals(0, 3, 8, 1), NU))


def test_eps_halving():
    # startup level 1/128 is below the default eps, forcing one halving
    tiny = mk_nu(Fr(1, 4), Fr(3, 8), Fr(1, 128), Fr(1, 4))
    p = build_polytope("Q", feasible_intervals(0, 3, 8, 1), tiny)
    (pt,) = witness_points("A4", p, r1=1, r2=2, r0=1)
    assert pt[7] == Fr(1, 128)
    with pytest.raises(UCFError, match="infeasible"):
        witness_points("A4", p, r1=1, r2=2, r0=1, eps=Fr(1, 2))


def test_infeasible_family_raises():
    # the all-on full-power point violates the initial-run generation caps
    sb = StatusBounds(w_lock=2, l_lock=0, u_run=1, k_run=1)
    A = feasible_intervals(0, 3, 8, 1, history="online", sb=sb, t_off=1)
    p = build_polytope("Q~", A, mk_nu(0.25, 0.375, 0.125, 0.25, p0=0.5),
                       sb=sb)
    with pytest.raises(UCFError, match="infeasible"):
        witness_points("A2", p)


def test_certificates_reach_facet_rank(q3):
    dim = polytope_dim(enumerate_vertices(q3))
    assert dim == 9
    kinds = {"ub": "gen_ub", "rup": "ramp_up", "rdn": "ramp_down"}
    checked = 0
    for row in q3.rows:
        mt = re.fullmatch(r"(ub|rup|rdn)\[(\d+)(?:,(\d+))?\]", row.name)
        if not mt:
            continue
        tag, t, a = mt.group(1), int(mt.group(2)), mt.group(3)
        pts = tight_assembly(q3, kinds[tag], t, int(a) if a else None)
        tight = [x for x in pts if row.tight(x) and q3.feasible(x)]
        assert polytope_dim(tight) == dim - 1, row.name
        checked += 1
    assert checked == 9
