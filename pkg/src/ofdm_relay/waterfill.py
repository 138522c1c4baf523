"""Single-hop water-filling: powers from a level, level from a rate demand."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels


class WaterLevel(NamedTuple):
    level: float
    active: np.ndarray
    count: int


def _gains(gains) -> np.ndarray:
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gains must be a non-empty 1-D vector")
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        raise ValueError("gains must be strictly positive and finite")
    return g


def waterfill_power(gains, level: float) -> np.ndarray:
    """Powers ``max(0, level - 1/g_k)``."""
    g = _gains(gains)
    if not level > 0:
        raise ValueError(f"water level must be positive, got {level}")
    return np.maximum(0.0, level - 1.0 / g)


def active_set(gains, level: float) -> tuple[np.ndarray, int]:
    """Indices with ``g_k > 1/level`` (strict) and their count."""
    g = np.asarray(gains, dtype=float)
    if not level > 0:
        raise ValueError(f"water level must be positive, got {level}")
    idx = np.flatnonzero(g * level > 1.0)
    return idx, int(idx.size)


def water_level_for_rate(gains, rate_demand: float) -> WaterLevel:
    """Level whose water-filling gives ``sum ln(1 + g p) = rate_demand``.

    The active count is found by bisection on the sorted gains, then the
    level follows in closed form as ``(e^demand / prod g)^(1/k)`` (in logs).
    """
    g = _gains(gains)
    if not rate_demand > 0:
        raise ValueError(f"rate demand must be positive, got {rate_demand}")
    _, logs, log_prefix, _ = _kernels.sort_hop(g)
    log_level, _, _ = _kernels.log_level_for_demand(logs, log_prefix, float(rate_demand))
    level = float(np.exp(log_level))
    idx, count = active_set(g, level)
    return WaterLevel(level, idx, count)


def achieved_rate(gains, powers) -> float:
    return float(np.log1p(np.asarray(gains) * np.asarray(powers)).sum())
