"""Minimum short-term power via two nested bisections.

The outer search runs on the multiplier of the time constraint; for each
trial value every hop's water level is recovered by an inner bisection,
and the resulting time shares are summed and compared with one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .model import Allocation, ChannelRealization, HopWaterLevels

DEFAULT_OUTER_TOL = 1e-6
DEFAULT_INNER_TOL = 1e-8


@dataclass(frozen=True)
class TbsDiagnostics:
    outer_iterations: int
    inner_iterations_per_hop: np.ndarray
    total_iterations: int
    beta: float
    levels: HopWaterLevels
    converged: bool


class TbsResult(NamedTuple):
    allocation: Allocation
    p_min: float
    diagnostics: TbsDiagnostics


def _sorted(gains) -> np.ndarray:
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0):
        raise ValueError("gains must be a non-empty vector of positive values")
    return np.sort(g)[::-1].copy()


def rho_of_lambda(gains, level: float, target: float) -> float:
    """Time share that lets water level ``level`` carry ``target`` nats."""
    g = _sorted(gains)
    denom = _kernels.log_rate_sum(g, float(level))
    if not denom > 0:
        raise ValueError(
            f"water level {level} leaves no active subcarrier (needs > {1.0 / g[0]})")
    return target / denom


def beta_of_lambda(gains, level: float) -> float:
    """Multiplier value paired with ``level``; increasing in ``level``."""
    g = _sorted(gains)
    if level < 1.0 / g[0]:
        raise ValueError(f"water level {level} below the lowest useful level {1.0 / g[0]}")
    return float(_kernels.beta_of_level(g, float(level)))


def invert_beta(gains, beta: float, tol: float = DEFAULT_INNER_TOL) -> float:
    """Water level with ``beta_of_lambda(level) == beta``, to relative width ``tol``."""
    g = _sorted(gains)
    if beta < 0:
        raise ValueError(f"beta {beta} is below the attainable minimum 0")
    level, _ = _kernels.invert_beta_sorted(g, float(beta), float(tol))
    return float(level)


def bracket_beta(channel: ChannelRealization, target: float) -> tuple[float, float]:
    """Lower and upper bound for the optimal multiplier."""
    g_sorted, _, _, _ = _kernels.sort_network(np.ascontiguousarray(channel.gains))
    lo, hi, _ = _kernels.bracket_beta_sorted(g_sorted, float(target))
    return float(lo), float(hi)


def tbs_solve(channel: ChannelRealization, target: float,
              outer_tol: float = DEFAULT_OUTER_TOL,
              inner_tol: float = DEFAULT_INNER_TOL) -> TbsResult:
    """Optimal time shares and powers meeting ``target`` on every hop.

    Tolerances are relative (outer: to the upper multiplier bound, inner: to
    the water level). After the search the shares are rescaled to sum to one
    and each hop is water-filled exactly at ``target / rho_n``.
    """
    if not target > 0:
        raise ValueError(f"target rate must be positive, got {target}")
    gains = np.ascontiguousarray(channel.gains)
    (rho, powers, log_levels, _, beta, outer, inner, total, p_min,
     converged) = _kernels.tbs_core(gains, float(target), float(outer_tol), float(inner_tol))
    levels = HopWaterLevels.from_levels(gains, np.exp(log_levels))
    diag = TbsDiagnostics(int(outer), inner.copy(), int(total), float(beta), levels,
                          bool(converged))
    return TbsResult(Allocation(rho, powers), float(p_min), diag)


def tbs_min_powers(frames: np.ndarray, target: float, outer_tol: float = DEFAULT_OUTER_TOL,
                   inner_tol: float = DEFAULT_INNER_TOL):
    """``p_min`` plus outer/total iteration counts for a stack of frames."""
    return _kernels.tbs_batch(np.ascontiguousarray(frames, dtype=float), float(target),
                              float(outer_tol), float(inner_tol))
