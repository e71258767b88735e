"""Instance parsing, validation, normalization and initial-status locks."""
import json
import math

import pytest
from hypothesis import given, strategies as st

from ucf import (ParseError, ValidationError, load_instance, normalize_unit,
                 status_bounds, warm_start_flag)
from tests.conftest import INST_1U

UNIT = {
    "id": "g", "p_min": 100, "p_max": 300, "p_up": 50, "p_down": 75,
    "p_start": 125, "p_shut": 150, "t_on": 3, "t_off": 2, "t_cold": 4,
    "alpha": 100, "beta": 10, "gamma": 0.01, "c_hot": 40, "c_cold": 90,
    "u0": 1, "t0": 1, "p0": 250,
}


def _inst(unit, T=4):
    return {"T": T, "demand": [120.0] * T, "reserve": [12.0] * T,
            "units": [unit]}


def test_load_roundtrip(tmp_path):
    path = tmp_path / "i.json"
    path.write_text(json.dumps(INST_1U))
    inst = load_instance(path)
    assert inst.T == 4
    assert inst.demand == (120, 150, 180, 130)
    assert inst.units[0].id == "g0"
    assert inst.units[0].p_max == 200


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        load_instance(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_instance(bad)
    with pytest.raises(ParseError):
        load_instance(42)


def test_validation_collects_every_violation():
    with pytest.raises(ValidationError) as err:
        load_instance({"T": "x"})
    msg = str(err.value)
    assert "'T'" in msg and "'demand'" in msg and "'units'" in msg


@pytest.mark.parametrize("patch", [
    {"p_min": 400},              # band inverted
    {"p_up": -1},                # negative ramp
    {"p_start": 50},             # startup level below the band
    {"t_on": 0},                 # minimum up time must be >= 1
    {"u0": 2},                   # status flag not binary
    {"u0": 0, "t0": 3},          # offline initial state needs t0 <= -1
    {"t0": 0},                   # zero is not a valid state age
])
def test_unit_invariants_rejected(patch):
    u = dict(UNIT)
    u.update(patch)
    u.setdefault("p0", 250)
    if u.get("u0") == 0:
        u.pop("p0", None)
    with pytest.raises(ValidationError):
        load_instance(_inst(u))


def test_series_length_checked():
    data = _inst(dict(UNIT))
    data["demand"] = [120.0] * 3
    with pytest.raises(ValidationError):
        load_instance(data)


def test_normalize_unit_exact():
    u = load_instance(_inst(dict(UNIT))).units[0]
    nu = normalize_unit(u)
    # span 200: at = 100 + 10*100 + 0.01*100^2, bt = 200*(10 + 2*0.01*100)
    assert nu.pt_up == 0.25
    assert nu.pt_down == 0.375
    assert nu.pt_start == 0.125
    assert nu.pt_shut == 0.25
    assert nu.pt0 == 0.75
    assert nu.at == 1200.0
    assert nu.bt == 2400.0
    assert nu.gt == 400.0


@given(pt=st.floats(0, 1, allow_nan=False))
def test_normalized_cost_matches_mw_cost(pt):
    u = load_instance(_inst(dict(UNIT))).units[0]
    nu = normalize_unit(u)
    p = u.p_min + (u.p_max - u.p_min) * pt
    direct = u.alpha + u.beta * p + u.gamma * p * p
    assert math.isclose(nu.cost(pt), direct, rel_tol=1e-12, abs_tol=1e-9)


def test_status_bounds_online():
    u = load_instance(_inst(dict(UNIT))).units[0]
    # t_on=3 with one period served: two more committed; pt0=0.75 needs
    # two periods at pt_down=0.375 to reach the shutdown level
    sb = status_bounds(u, 4)
    assert (sb.w_lock, sb.l_lock, sb.u_run, sb.k_run) == (2, 0, 2, 2)


def test_status_bounds_offline():
    u = dict(UNIT, t_on=2, t_off=3, u0=0, t0=-2, gamma=0)
    u.pop("p0")
    sb = status_bounds(load_instance(_inst(u, T=6)).units[0], 6)
    assert (sb.w_lock, sb.l_lock, sb.u_run, sb.k_run) == (0, 1, 0, 0)


def test_warm_start_flag_offline_history():
    u = dict(UNIT, t_on=2, t_off=3, u0=0, t0=-2, gamma=0)
    u.pop("p0")
    unit = load_instance(_inst(u, T=6)).units[0]
    # cooldown horizon t_off + t_cold = 7 never clears within T=6, and the
    # unit has been off for only 2 periods: every startup stays hot
    assert [warm_start_flag(unit, t) for t in range(1, 7)] == [1] * 6
    cold = dict(u, t0=-9)
    unit2 = load_instance(_inst(cold, T=6)).units[0]
    assert warm_start_flag(unit2, 1) == 0


def test_unknown_keys_rejected():
    data = _inst(dict(UNIT))
    data["extra"] = 1
    with pytest.raises(ValidationError):
        load_instance(data)
    with pytest.raises(ValidationError):
        load_instance(_inst(dict(UNIT, bogus=3)))
