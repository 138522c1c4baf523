"""Grid-search reference for the minimum short-term power.

Shares live on the grid ``i * delta`` (every hop gets at least one step);
for each grid point the per-hop minimum power is exact water-filling, so
the grid minimum is an upper bound that tightens as ``delta`` shrinks.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .model import ChannelRealization

MAX_ORACLE_HOPS = 4


def default_resolution(n_hops: int) -> float:
    """Finest grid that stays fast for the given hop count."""
    return {1: 1.0, 2: 1e-4, 3: 1e-3, 4: 1e-2}.get(n_hops, 1e-2)


def brute_force_min_power(channel: ChannelRealization, target: float,
                          grid_resolution: float | None = None) -> float:
    n = channel.n_hops
    if n > MAX_ORACLE_HOPS:
        raise ValueError(f"grid oracle refuses N={n} > {MAX_ORACLE_HOPS} hops")
    if not target > 0:
        raise ValueError(f"target rate must be positive, got {target}")
    delta = default_resolution(n) if grid_resolution is None else grid_resolution
    steps = int(round(1.0 / delta))
    if steps < n:
        raise ValueError(f"grid resolution {delta} is too coarse for {n} hops")
    return float(_kernels.grid_min_energy(np.ascontiguousarray(channel.gains), float(target),
                                          steps))
