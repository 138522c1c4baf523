"""Sub-optimal allocation from per-hop gain statistics.

Time shares come in closed form from each hop's geometric-mean statistic
and active count, tied together by one scalar found by bisection; active
counts are then refreshed and the two steps repeat until they settle.
Final powers are exact water-filling at the resulting time shares.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .model import Allocation, ChannelRealization, HopWaterLevels

DEFAULT_MU_TOL = 1e-10
DEFAULT_MAX_PASSES = 50

_STATUS_NAMES = {
    _kernels.STATUS_MAX_PASSES: "max-passes",
    _kernels.STATUS_CONVERGED: "converged",
    _kernels.STATUS_CYCLE: "cycle",
}


@dataclass(frozen=True)
class HopStats:
    """Active-set summary of one hop.

    ``a`` is the log geometric mean of the active gains minus ``ln k``;
    ``b`` is the sum of inverse active gains (``k`` over the harmonic mean).
    """

    active_count: int
    a: float
    b: float

    @property
    def geometric_mean(self) -> float:
        return float(np.exp(self.a + np.log(self.active_count)))

    @property
    def harmonic_mean(self) -> float:
        return self.active_count / self.b


@dataclass(frozen=True)
class IasDiagnostics:
    outer_passes: int
    mu: float
    total_iterations: int
    status: str
    # closed-form per-hop values at the returned iterate, for structure checks
    approx_levels: np.ndarray
    approx_hop_powers: np.ndarray
    stats: tuple[HopStats, ...]
    levels: HopWaterLevels

    @property
    def converged(self) -> bool:
        return self.status != "max-passes"


class IasResult(NamedTuple):
    allocation: Allocation
    p_min: float
    diagnostics: IasDiagnostics


def hop_stats(gains, active) -> HopStats:
    g = np.asarray(gains, dtype=float)
    idx = np.asarray(active, dtype=np.int64).ravel()
    if idx.size == 0:
        raise ValueError("active set must be non-empty")
    sel = g[idx]
    k = idx.size
    return HopStats(k, float(np.log(sel).mean() - np.log(k)), float((1.0 / sel).sum()))


def rho_of_mu(stats: HopStats, mu: float, target: float) -> float:
    denom = stats.active_count * (target * mu + stats.a)
    if not denom > 0:
        raise ValueError(f"mu={mu} gives a non-positive denominator for this hop")
    return target / denom


def mu_bounds(stats_all_hops: Sequence[HopStats], target: float) -> tuple[float, float]:
    """Bracket: some share equals 1 at the low end, all are <= 1/N at the top."""
    n = len(stats_all_hops)
    lo = max(1.0 / s.active_count - s.a / target for s in stats_all_hops)
    hi = max(n / s.active_count - s.a / target for s in stats_all_hops)
    return lo, hi


def solve_mu(stats_all_hops: Sequence[HopStats], target: float,
             tol: float = DEFAULT_MU_TOL) -> float:
    """Scalar making the closed-form time shares sum to one."""
    if not stats_all_hops:
        raise ValueError("need at least one hop")
    lo, hi = mu_bounds(stats_all_hops, target)
    if hi < lo:
        raise ValueError(f"empty mu bracket [{lo}, {hi}]")
    counts = np.array([s.active_count for s in stats_all_hops], dtype=np.int64)
    a = np.array([s.a for s in stats_all_hops])
    mu, _ = _kernels.solve_mu_core(counts, a, float(target), float(tol))
    return float(mu)


def find_active_count(sorted_gains, rate_demand: float) -> int:
    """Active count for a hop that must carry ``rate_demand`` nats.

    ``sorted_gains`` must be in descending order.
    """
    g = np.asarray(sorted_gains, dtype=float)
    if np.any(np.diff(g) > 0):
        raise ValueError("gains must be sorted in descending order")
    if not rate_demand > 0:
        raise ValueError(f"rate demand must be positive, got {rate_demand}")
    logs = np.log(g)
    log_prefix = np.concatenate(([0.0], np.cumsum(logs)))
    k, _ = _kernels.active_count_for_demand(logs, log_prefix, float(rate_demand))
    return int(k)


def ias_solve(channel: ChannelRealization, target: float, tol: float = DEFAULT_MU_TOL,
              max_passes: int = DEFAULT_MAX_PASSES) -> IasResult:
    if not target > 0:
        raise ValueError(f"target rate must be positive, got {target}")
    gains = np.ascontiguousarray(channel.gains)
    (rho, powers, log_levels, _, mu, passes, total, p_min, status,
     used_counts) = _kernels.ias_core(gains, float(target), float(tol), int(max_passes))
    stats = []
    for n in range(gains.shape[0]):
        top = np.argsort(-gains[n], kind="stable")[: used_counts[n]]
        stats.append(hop_stats(gains[n], top))
    b = np.array([s.b for s in stats])
    with np.errstate(over="ignore"):
        approx_levels = np.exp(target * mu - np.log(used_counts))
        approx_hop_powers = np.exp(target * mu) - b
    diag = IasDiagnostics(
        outer_passes=int(passes),
        mu=float(mu),
        total_iterations=int(total),
        status=_STATUS_NAMES[int(status)],
        approx_levels=approx_levels,
        approx_hop_powers=approx_hop_powers,
        stats=tuple(stats),
        levels=HopWaterLevels.from_levels(gains, np.exp(log_levels)),
    )
    return IasResult(Allocation(rho, powers), float(p_min), diag)


def ias_min_powers(frames: np.ndarray, target: float, tol: float = DEFAULT_MU_TOL,
                   max_passes: int = DEFAULT_MAX_PASSES):
    """``p_min``, outer passes, total iterations and status codes per frame."""
    return _kernels.ias_batch(np.ascontiguousarray(frames, dtype=float), float(target),
                              float(tol), int(max_passes))
