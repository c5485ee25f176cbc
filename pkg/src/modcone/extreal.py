"""Saturating arithmetic on ``[0, inf]`` for real-valued modular metrics.

Values are plain floats with ``math.inf`` as the top element.  The helpers
never produce NaN: ``inf - inf`` is not an operation modular metrics need.
"""

from __future__ import annotations

import math

INF = math.inf


class ExtendedRealError(ValueError):
    pass


def check(value: float) -> float:
    """Validate a modular value: a float in ``[0, inf]``, never NaN."""
    v = float(value)
    if math.isnan(v):
        raise ExtendedRealError("NaN escaped a modular evaluation")
    return v


def add(a: float, b: float) -> float:
    if a == INF or b == INF:
        return INF
    return a + b


def scale(t: float, a: float) -> float:
    """``t * a`` for ``t >= 0`` with ``0 * inf = 0``."""
    if t < 0:
        raise ExtendedRealError("negative scale on [0, inf]")
    if a == INF:
        return INF if t > 0 else 0.0
    return t * a


def minimum(a: float, b: float) -> float:
    return a if a <= b else b


def le(a: float, b: float, rtol: float = 1e-12) -> bool:
    """``a <= b`` with relative slack; ``inf <= inf`` holds."""
    if b == INF:
        return True
    if a == INF:
        return False
    return a <= b + rtol * (1.0 + abs(a) + abs(b))
