"""Shared fixtures: small hand-written instances with known optima."""
import copy

import pytest

from ucf import load_instance

# single unit, linear cost, T=4; every kind solves this to 625.0
INST_1U = {
    "T": 4,
    "demand": [120, 150, 180, 130],
    "reserve": [12, 15, 18, 13],
    "units": [{
        "id": "g0", "p_min": 100, "p_max": 200, "p_up": 50, "p_down": 50,
        "p_start": 125, "p_shut": 125, "t_on": 1, "t_off": 1, "t_cold": 1,
        "alpha": 10, "beta": 1, "gamma": 0, "c_hot": 5, "c_cold": 15,
        "u0": 0, "t0": -2,
    }],
}

# two units with quadratic cost and mixed initial status, T=8
INST_2U = {
    "T": 8,
    "demand": [260, 300, 340, 340, 320, 300, 260, 240],
    "reserve": [26, 30, 34, 34, 32, 30, 26, 24],
    "units": [
        {"id": "a", "p_min": 100, "p_max": 200, "p_up": 50, "p_down": 50,
         "p_start": 125, "p_shut": 125, "t_on": 1, "t_off": 1, "t_cold": 2,
         "alpha": 10, "beta": 2.0, "gamma": 0.004, "c_hot": 40,
         "c_cold": 90, "u0": 0, "t0": -1},
        {"id": "b", "p_min": 100, "p_max": 200, "p_up": 40, "p_down": 40,
         "p_start": 120, "p_shut": 120, "t_on": 3, "t_off": 2, "t_cold": 1,
         "alpha": 8, "beta": 1.5, "gamma": 0.002, "c_hot": 30,
         "c_cold": 70, "u0": 1, "t0": 2, "p0": 190},
    ],
}


@pytest.fixture
def inst1u():
    return load_instance(copy.deepcopy(INST_1U))


@pytest.fixture
def inst2u():
    return load_instance(copy.deepcopy(INST_2U))


@pytest.fixture
def unit_dict():
    return copy.deepcopy(INST_1U["units"][0])
