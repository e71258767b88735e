"""Small numeric helpers shared across modules.

Float inputs get a 1e-9 snap-to-integer guard before ceil/floor and before
strict comparisons; exact types (int, Fraction) pass through untouched.
"""
from __future__ import annotations

import math
from fractions import Fraction

SNAP = 1e-9


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def snap(x):
    """Round x to the nearest integer when it is within SNAP of one."""
    if _is_exact(x):
        return x
    r = round(x)
    return float(r) if abs(x - r) < SNAP else x


def snap_ceil(x) -> int:
    return math.ceil(snap(x))


def snap_floor(x) -> int:
    return math.floor(snap(x))


def lt(a, b) -> bool:
    """Strict a < b after snapping the float difference."""
    if _is_exact(a) and _is_exact(b):
        return a < b
    d = snap(float(a) - float(b))
    return d < 0
