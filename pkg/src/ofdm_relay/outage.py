"""On-off transmission control under a long-term average power budget.

A frame transmits at its minimum required power when that power is at or
below the threshold ``s*`` and stays silent otherwise. The threshold is
adapted online from the running average of transmitted power, or computed
offline from a sample of required powers.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .config import DEFAULT_STEP_SCALE

THRESHOLD_FLOOR = 1e-12


@dataclass(frozen=True)
class ThresholdState:
    threshold: float
    step: float
    frame_count: int = 0
    power_sum: float = 0.0

    def __post_init__(self) -> None:
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if self.frame_count < 0 or self.power_sum < 0:
            raise ValueError("frame_count and power_sum must be non-negative")

    @classmethod
    def initial(cls, budget: float, step: float) -> ThresholdState:
        """Controller start: threshold equal to the budget, no history."""
        return cls(threshold=budget, step=step)

    @property
    def running_average(self) -> float:
        return self.power_sum / self.frame_count if self.frame_count else 0.0


def decide(p_min: float, state: ThresholdState) -> tuple[bool, float]:
    """Transmit (at ``p_min``) iff ``p_min <= threshold``."""
    if p_min <= state.threshold:
        return True, p_min
    return False, 0.0


def update_threshold(state: ThresholdState, transmitted: float,
                     budget: float) -> ThresholdState:
    """Fold one frame into the history and move the threshold.

    ``s <- s * (1 + step * (budget - running_average))`` with the running
    average over every frame so far, including this one. Clamped below at
    ``THRESHOLD_FLOOR * budget``.
    """
    t = state.frame_count + 1
    total = state.power_sum + transmitted
    s = state.threshold * (1.0 + state.step * (budget - total / t))
    return dataclasses.replace(state, threshold=max(s, THRESHOLD_FLOOR * budget), frame_count=t,
                               power_sum=total)


class AnalyticThreshold(NamedTuple):
    threshold: float
    boundary_weight: float
    off_fraction: float
    average_power: float


def analytic_threshold(p_min_samples: Sequence[float], budget: float) -> AnalyticThreshold:
    """Optimal threshold for the empirical distribution of ``p_min_samples``.

    ``s* = sup{s : E[p 1{p < s}] < budget}``; frames exactly at ``s*``
    transmit with probability ``boundary_weight`` so the budget is met
    with equality.
    """
    x = np.sort(np.asarray(p_min_samples, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one sample")
    if not budget > 0:
        raise ValueError(f"budget must be positive, got {budget}")
    m = x.size
    if x.sum() / m <= budget:
        return AnalyticThreshold(math.inf, 1.0, 0.0, float(x.sum() / m))
    cum = np.cumsum(x) / m
    j = int(np.searchsorted(cum, budget, side="left"))
    s = x[j]
    lo = int(np.searchsorted(x, s, side="left"))
    hi = int(np.searchsorted(x, s, side="right"))
    below = x[:lo].sum() / m
    at_or_below = x[:hi].sum() / m
    w0 = 1.0 if at_or_below == below else (budget - below) / (at_or_below - below)
    w0 = min(max(w0, 0.0), 1.0)
    off = 1.0 - lo / m - w0 * (hi - lo) / m
    return AnalyticThreshold(float(s), float(w0), float(off), float(below + w0 * (at_or_below - below)))


def budget_for_outage(p_min_samples: Sequence[float], outage: float) -> float:
    """Smallest average power whose optimal threshold leaves ``outage`` off.

    The cheapest ``1 - outage`` fraction of frames transmit; the frame on
    the boundary contributes fractionally.
    """
    x = np.sort(np.asarray(p_min_samples, dtype=float))
    if not 0 <= outage < 1:
        raise ValueError(f"outage must be in [0, 1), got {outage}")
    keep = (1.0 - outage) * x.size
    whole = int(math.floor(keep))
    power = x[:whole].sum()
    if whole < x.size:
        power += (keep - whole) * x[whole]
    return float(power / x.size)


class OutageLoopResult(NamedTuple):
    outage_rate: float
    average_power: float
    on: np.ndarray
    thresholds: np.ndarray
    running_average: np.ndarray
    final_state: ThresholdState


def run_outage_loop(p_min_stream: Sequence[float], budget: float, step: float | None = None,
                    initial_threshold: float | None = None) -> OutageLoopResult:
    """Run the online controller over a stream of per-frame required powers.

    ``step`` defaults to ``1e-2 / budget``; the first threshold to ``budget``.
    The threshold never drops below ``THRESHOLD_FLOOR * budget``.
    """
    p = np.ascontiguousarray(p_min_stream, dtype=float)
    if p.size == 0:
        raise ValueError("empty p_min stream")
    step = DEFAULT_STEP_SCALE / budget if step is None else step
    s0 = budget if initial_threshold is None else initial_threshold
    on, thresholds, running, s_final = _kernels.threshold_loop(
        p, float(budget), float(step), float(s0), THRESHOLD_FLOOR * budget)
    total = float(np.where(on, p, 0.0).sum())
    final = ThresholdState(threshold=float(s_final), step=step, frame_count=p.size,
                           power_sum=total)
    return OutageLoopResult(float(1.0 - on.mean()), total / p.size, on, thresholds, running,
                            final)


def write_threshold_trace(path: str | Path, result: OutageLoopResult) -> None:
    """CSV with columns t, s_star, running_avg_power, on_flag (t is 1-based)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s_star", "running_avg_power", "on_flag"])
        for t, (s, avg, on) in enumerate(zip(result.thresholds, result.running_average,
                                             result.on), start=1):
            writer.writerow([t, f"{s:.9g}", f"{avg:.9g}", int(on)])
