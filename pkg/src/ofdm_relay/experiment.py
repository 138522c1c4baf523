"""Monte-Carlo driver: frames -> per-scheme rates or required powers ->
on-off control -> outage statistics and CSV files.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .channel import SUI3, PathLossModel, SuiTapProfile, draw_frames
from .config import NetworkConfig
from .ias import ias_min_powers
from .model import ChannelRealization
from .oracle import MAX_ORACLE_HOPS, brute_force_min_power
from .outage import OutageLoopResult, budget_for_outage, run_outage_loop
from .static import apft_min_powers, fpat_rates, upt_rates
from .tbs import tbs_min_powers

log = logging.getLogger(__name__)

SCHEMES = ("UPT", "FPAT", "APFT", "APT-opt", "APT-sub")
ADAPTIVE_SCHEMES = ("APFT", "APT-opt", "APT-sub")

RESULT_COLUMNS = ("scheme", "N", "K", "R", "P_budget", "seed", "n_frames", "outage_rate",
                  "avg_power", "avg_outer_iters", "avg_total_iters")
TRACE_COLUMNS = ("frame", "p_min", "on", "rate", "outage")

# fixed-power schemes: a frame is in outage when rate < R * (1 - RATE_RTOL)
RATE_RTOL = 1e-9
ORACLE_SAMPLE = 10


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def check_scheme(scheme: str) -> str:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    return scheme


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    p_min: float
    on: bool
    rate: float
    outage: bool

    def row(self, bits: bool = False) -> list[str]:
        out = [fmt(self.frame), fmt(self.p_min), fmt(self.on), fmt(self.rate), fmt(self.outage)]
        if bits:
            out.append(fmt(self.rate / math.log(2.0)))
        return out


@dataclass
class RequiredPower:
    """Short-term minimum power per frame for one adaptive scheme."""

    scheme: str
    target_rate: float
    p_min: np.ndarray
    outer_iters: np.ndarray
    total_iters: np.ndarray
    converged: np.ndarray

    def iteration_means(self) -> tuple[float, float]:
        ok = self.converged
        if not ok.any():
            return math.nan, math.nan
        return float(self.outer_iters[ok].mean()), float(self.total_iters[ok].mean())


def required_power(frames: np.ndarray, scheme: str, config: NetworkConfig) -> RequiredPower:
    """Solve the short-term power minimization of ``scheme`` on every frame."""
    check_scheme(scheme)
    r = config.target_rate
    n = frames.shape[0]
    if scheme == "APT-opt":
        p, outer, total = tbs_min_powers(frames, r, config.outer_tol, config.inner_tol)
        converged = np.isfinite(p)
    elif scheme == "APT-sub":
        p, outer, total, status = ias_min_powers(frames, r, config.mu_tol, config.max_ias_passes)
        converged = status != 0
    elif scheme == "APFT":
        p = apft_min_powers(frames, r)
        outer = np.zeros(n, dtype=np.int64)
        total = np.zeros(n, dtype=np.int64)
        converged = np.isfinite(p)
    else:
        raise ValueError(f"{scheme} has no power adaptation")
    return RequiredPower(scheme, r, p, outer, total, converged)


def fixed_power_rates(frames: np.ndarray, scheme: str, budget: float) -> np.ndarray:
    if scheme == "UPT":
        return upt_rates(frames, budget)
    if scheme == "FPAT":
        return fpat_rates(frames, budget)
    raise ValueError(f"{scheme} is not a fixed-power scheme")


@dataclass
class ExperimentResult:
    scheme: str
    config: NetworkConfig
    seed: int
    outage_rate: float
    avg_power: float
    avg_outer_iters: float
    avg_total_iters: float
    n_unconverged: int = 0
    records: list[FrameRecord] | None = None
    loop: OutageLoopResult | None = None
    oracle_gaps: np.ndarray | None = None

    def row(self) -> list[str]:
        c = self.config
        return [self.scheme, fmt(c.n_hops), fmt(c.n_subcarriers), fmt(c.target_rate),
                fmt(c.power_budget), fmt(self.seed), fmt(c.n_frames), fmt(self.outage_rate),
                fmt(self.avg_power), fmt(self.avg_outer_iters), fmt(self.avg_total_iters)]


def oracle_gaps(frames: np.ndarray, config: NetworkConfig, sample: int = ORACLE_SAMPLE,
                grid_resolution: float | None = None) -> np.ndarray:
    """Relative gap of the optimal solver to the grid oracle on spread-out frames."""
    if config.n_hops > MAX_ORACLE_HOPS:
        raise ValueError(f"oracle cross-check needs N <= {MAX_ORACLE_HOPS}")
    idx = np.unique(np.linspace(0, frames.shape[0] - 1, min(sample, frames.shape[0])).astype(int))
    p, _, _ = tbs_min_powers(frames[idx], config.target_rate, config.outer_tol, config.inner_tol)
    ref = np.array([brute_force_min_power(ChannelRealization(frames[i], int(i)),
                                          config.target_rate, grid_resolution) for i in idx])
    return p / ref - 1.0


def run_experiment(config: NetworkConfig, scheme: str, seed: int = 0, *,
                   frames: np.ndarray | None = None,
                   required: RequiredPower | None = None,
                   profile: SuiTapProfile = SUI3,
                   pathloss: PathLossModel | None = None,
                   keep_records: bool = False,
                   oracle: bool = False) -> ExperimentResult:
    """Simulate ``config.n_frames`` frames of one scheme at ``config.power_budget``.

    ``frames`` (shape ``(F, N, K)``) and ``required`` may be passed in to
    reuse channel draws and solver output across budgets.
    """
    check_scheme(scheme)
    if frames is None:
        frames = draw_frames(config, seed, profile=profile, pathloss=pathloss)
    if frames.shape != (config.n_frames, config.n_hops, config.n_subcarriers):
        raise ValueError(f"frames have shape {frames.shape}, config expects "
                         f"{(config.n_frames, config.n_hops, config.n_subcarriers)}")
    budget = config.power_budget
    r = config.target_rate
    records = None
    loop = None
    gaps = None
    if scheme in ADAPTIVE_SCHEMES:
        if required is None:
            required = required_power(frames, scheme, config)
        loop = run_outage_loop(required.p_min, budget, config.step)
        outage_rate = loop.outage_rate
        avg_power = loop.average_power
        outer, total = required.iteration_means()
        unconverged = int((~required.converged).sum())
        if keep_records:
            records = [FrameRecord(i, float(p), bool(on), r if on else 0.0, not on)
                       for i, (p, on) in enumerate(zip(required.p_min, loop.on))]
    else:
        rates = fixed_power_rates(frames, scheme, budget)
        short = rates < r * (1.0 - RATE_RTOL)
        outage_rate = float(short.mean())
        avg_power = budget
        outer = total = 0.0
        unconverged = 0
        if keep_records:
            records = [FrameRecord(i, budget, True, float(rate), bool(o))
                       for i, (rate, o) in enumerate(zip(rates, short))]
    if unconverged:
        log.warning("%s: %d of %d frames did not converge", scheme, unconverged, config.n_frames)
    if oracle:
        if config.n_hops <= MAX_ORACLE_HOPS:
            gaps = oracle_gaps(frames, config)
            log.info("oracle cross-check on %d frames: max |gap| %.3g", gaps.size,
                     np.abs(gaps).max())
        else:
            log.warning("oracle cross-check skipped: N=%d > %d", config.n_hops, MAX_ORACLE_HOPS)
    return ExperimentResult(scheme, config, seed, outage_rate, avg_power, outer, total,
                            unconverged, records, loop, gaps)


def write_results(dest: str | Path | TextIO, results: Sequence[ExperimentResult]) -> None:
    """Results CSV to a path or an open text stream."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_results(fh, results)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for res in results:
        writer.writerow(res.row())


def write_trace(path: str | Path, records: Sequence[FrameRecord], bits: bool = False) -> None:
    """Per-frame CSV; ``bits`` appends the rate in bits per symbol."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS + (("rate_bits",) if bits else ()))
        for rec in records:
            writer.writerow(rec.row(bits))


def parse_budget_sweep(text: str) -> list[float]:
    """``lo:hi:steps`` in dB -> evenly spaced dB values (inclusive)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"budget sweep must look like lo:hi:steps, got {text!r}")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 0:
        raise ValueError("sweep steps must be non-negative")
    if steps == 1:
        return [lo]
    return [float(v) for v in np.linspace(lo, hi, steps)]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def min_power_for_outage(config: NetworkConfig, seed: int, outage: float = 0.01, *,
                         scheme: str = "APT-opt", profile: SuiTapProfile = SUI3,
                         pathloss: PathLossModel | None = None) -> float:
    """Average power at which the optimal threshold gives ``outage``.

    Uses the offline threshold on the empirical ``p_min`` distribution.
    """
    frames = draw_frames(config, seed, profile=profile, pathloss=pathloss)
    return budget_for_outage(required_power(frames, scheme, config).p_min, outage)


@dataclass
class SweepSpec:
    budgets_db: Sequence[float] = ()
    rates: Sequence[float] = ()
    hops: Sequence[int] = ()
    schemes: Sequence[str] = SCHEMES
    # None keeps the exponent from the path-loss model
    alphas: Sequence[float | None] = (None,)
    outage_target: float = 0.01
    files: dict[str, Path] = field(default_factory=dict)


SWEEP_FILES = {
    "outage_vs_power": RESULT_COLUMNS,
    "avg_power_vs_rate": ("N", "K", "R", "seed", "n_frames", "tbs_avg_power", "ias_avg_power",
                          "ias_to_tbs_ratio"),
    "iterations_vs_rate": ("N", "K", "R", "seed", "n_frames", "ias_avg_outer_passes",
                           "ias_avg_total_iters", "tbs_avg_outer_iters", "tbs_avg_total_iters"),
    "power_vs_hops": ("alpha", "R", "N", "outage_target", "power_for_outage",
                      "power_for_outage_db", "optimal"),
}


def sweep_and_report(config: NetworkConfig, spec: SweepSpec, out_dir: str | Path,
                     seed: int = 0, *, profile: SuiTapProfile = SUI3,
                     pathloss: PathLossModel | None = None) -> dict[str, Path]:
    """Write the four figure-style CSV files into ``out_dir``.

    Frames and solver outputs are shared between files; the grids that are
    empty in ``spec`` produce header-only files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base_pl = PathLossModel() if pathloss is None else pathloss
    frame_cache: dict[tuple, np.ndarray] = {}
    solve_cache: dict[tuple, RequiredPower] = {}

    def frames_for(n_hops, alpha=None):
        key = (n_hops, alpha)
        if key not in frame_cache:
            pl = base_pl if alpha is None else PathLossModel(
                **{**base_pl.__dict__, "alpha_override": alpha, "fixed_loss_db": None})
            frame_cache[key] = draw_frames(config.replace(n_hops=n_hops), seed, profile=profile,
                                           pathloss=pl)
        return frame_cache[key]

    def solve(n_hops, rate, scheme, alpha=None):
        key = (n_hops, rate, scheme, alpha)
        if key not in solve_cache:
            cfg = config.replace(n_hops=n_hops, target_rate=rate)
            solve_cache[key] = required_power(frames_for(n_hops, alpha), scheme, cfg)
        return solve_cache[key]

    rows: dict[str, list[list[str]]] = {name: [] for name in SWEEP_FILES}
    for n_hops in spec.hops:
        for rate in spec.rates:
            for scheme in spec.schemes:
                check_scheme(scheme)
                for db in spec.budgets_db:
                    cfg = config.replace(n_hops=n_hops, target_rate=rate,
                                         power_budget=db_to_linear(db))
                    req = solve(n_hops, rate, scheme) if scheme in ADAPTIVE_SCHEMES else None
                    res = run_experiment(cfg, scheme, seed, frames=frames_for(n_hops),
                                         required=req)
                    rows["outage_vs_power"].append(res.row())
            tbs = solve(n_hops, rate, "APT-opt")
            ias = solve(n_hops, rate, "APT-sub")
            common = [fmt(n_hops), fmt(config.n_subcarriers), fmt(rate), fmt(seed),
                      fmt(config.n_frames)]
            rows["avg_power_vs_rate"].append(common + [
                fmt(tbs.p_min.mean()), fmt(ias.p_min.mean()), fmt((ias.p_min / tbs.p_min).mean())])
            ias_outer, ias_total = ias.iteration_means()
            tbs_outer, tbs_total = tbs.iteration_means()
            rows["iterations_vs_rate"].append(common + [
                fmt(ias_outer), fmt(ias_total), fmt(tbs_outer), fmt(tbs_total)])
    for alpha in spec.alphas:
        alpha_value = base_pl.alpha if alpha is None else alpha
        for rate in spec.rates:
            powers = [budget_for_outage(solve(n, rate, "APT-opt", alpha).p_min,
                                        spec.outage_target) for n in spec.hops]
            best = int(np.argmin(powers)) if powers else -1
            for i, (n_hops, p) in enumerate(zip(spec.hops, powers)):
                rows["power_vs_hops"].append([
                    fmt(alpha_value), fmt(rate), fmt(n_hops), fmt(spec.outage_target), fmt(p),
                    fmt(10.0 * math.log10(p)), fmt(i == best)])
    paths = {}
    for name, header in SWEEP_FILES.items():
        path = out / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows[name])
        paths[name] = path
    spec.files.update(paths)
    return paths
