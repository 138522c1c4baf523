"""Baseline policies: uniform power and time (UPT), fixed power with adaptive
time (FPAT), and adaptive power with fixed time (APFT).

The ``*_rates`` helpers take a stack of frames, shape ``(F, N, K)``, and
are what the simulator uses; the scalar functions take one realization.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .model import Allocation, ChannelRealization
from .waterfill import waterfill_power, water_level_for_rate


def _hop_capacities(gains: np.ndarray, total_power: float) -> np.ndarray:
    """sum_k ln(1 + g P/K) along the last axis."""
    if not total_power > 0:
        raise ValueError(f"total power must be positive, got {total_power}")
    k = gains.shape[-1]
    return np.log1p(gains * (total_power / k)).sum(axis=-1)


def upt_allocation(channel: ChannelRealization, total_power: float) -> Allocation:
    n, k = channel.gains.shape
    return Allocation(np.full(n, 1.0 / n), np.full((n, k), total_power / k))


def upt_rate(channel: ChannelRealization, total_power: float) -> float:
    c = _hop_capacities(channel.gains, total_power)
    return float(c.min() / c.size)


def upt_rates(frames: np.ndarray, total_power: float) -> np.ndarray:
    c = _hop_capacities(frames, total_power)
    return c.min(axis=-1) / c.shape[-1]


def fpat_shares(channel: ChannelRealization, total_power: float) -> np.ndarray:
    """Time shares inversely proportional to each hop's fixed-power capacity."""
    inv = 1.0 / _hop_capacities(channel.gains, total_power)
    return inv / inv.sum()


def fpat_allocation(channel: ChannelRealization, total_power: float) -> Allocation:
    n, k = channel.gains.shape
    return Allocation(fpat_shares(channel, total_power), np.full((n, k), total_power / k))


def fpat_rate(channel: ChannelRealization, total_power: float) -> float:
    """Harmonic combination ``1 / sum_n (1/c_n)`` of the hop capacities."""
    c = _hop_capacities(channel.gains, total_power)
    return float(1.0 / (1.0 / c).sum())


def fpat_rates(frames: np.ndarray, total_power: float) -> np.ndarray:
    c = _hop_capacities(frames, total_power)
    with np.errstate(divide="ignore"):
        return 1.0 / (1.0 / c).sum(axis=-1)


def apft_min_power(channel: ChannelRealization, target: float) -> tuple[Allocation, float]:
    """Equal time shares; each hop water-fills to carry ``N * target``."""
    if not target > 0:
        raise ValueError(f"target rate must be positive, got {target}")
    n = channel.n_hops
    powers = np.empty_like(channel.gains)
    for hop in range(n):
        wl = water_level_for_rate(channel.gains[hop], n * target)
        powers[hop] = waterfill_power(channel.gains[hop], wl.level)
    alloc = Allocation(np.full(n, 1.0 / n), powers)
    return alloc, float(powers.sum() / n)


def apft_min_powers(frames: np.ndarray, target: float) -> np.ndarray:
    return _kernels.apft_batch(np.ascontiguousarray(frames, dtype=float), float(target))
