"""Block-fading SUI-3 channel draws for an equally spaced relay chain.

Each hop gets an independent three-tap realization per frame, evaluated on
``K`` subcarrier centre frequencies, scaled by the hop's median path loss
and divided by ``snr_gap * noise_power``. Frame ``f`` of seed ``s`` always
comes from its own generator keyed by ``(s, f)``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import NetworkConfig
from .model import ChannelRealization

SPEED_OF_LIGHT = 2.998e8


@dataclass(frozen=True)
class SuiTapProfile:
    tap_delays_us: tuple[float, ...] = (0.0, 0.4, 0.9)
    tap_powers_db: tuple[float, ...] = (0.0, -5.0, -10.0)
    rician_k_first_tap: float = 1.0
    # documented value only; the default taps give about 0.26 us
    rms_delay_spread_us: float = 0.305

    def __post_init__(self) -> None:
        d = np.asarray(self.tap_delays_us)
        if d.size != len(self.tap_powers_db) or d.size == 0:
            raise ValueError("tap delays and powers must have the same non-zero length")
        if d[0] != 0 or np.any(np.diff(d) <= 0):
            raise ValueError("tap delays must start at 0 and increase strictly")
        if not np.all(np.isfinite(self.tap_powers_db)):
            raise ValueError("tap powers must be finite")
        if self.rician_k_first_tap < 0:
            raise ValueError("Rician K-factor must be non-negative")

    @property
    def tap_powers(self) -> np.ndarray:
        """Linear tap powers normalized to unit total."""
        p = 10.0 ** (np.asarray(self.tap_powers_db) / 10.0)
        return p / p.sum()

    def derived_rms_delay_spread_us(self) -> float:
        p = self.tap_powers
        d = np.asarray(self.tap_delays_us)
        mean = (p * d).sum()
        return float(np.sqrt((p * d**2).sum() - mean**2))


SUI3 = SuiTapProfile()


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance median path loss with a free-space intercept at ``d0``."""

    ref_distance_m: float = 100.0
    base_station_height_m: float = 30.0
    exponent_params: tuple[float, float, float] = (4.0, 0.0065, 17.1)
    carrier_hz: float = 1.9e9
    alpha_override: float | None = None
    # use A + alpha*log10(d/d0), without the factor 10
    literal: bool = False
    fixed_loss_db: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.fixed_loss_db is None:
            wavelength = SPEED_OF_LIGHT / self.carrier_hz
            a = 20.0 * math.log10(4.0 * math.pi * self.ref_distance_m / wavelength)
            object.__setattr__(self, "fixed_loss_db", a)

    @property
    def alpha(self) -> float:
        if self.alpha_override is not None:
            return self.alpha_override
        a, b, c = self.exponent_params
        hb = self.base_station_height_m
        return a - b * hb + c / hb


def path_loss_db(model: PathLossModel, distance_m: float) -> float:
    if distance_m < model.ref_distance_m:
        warnings.warn(f"distance {distance_m} m is below the reference distance "
                      f"{model.ref_distance_m} m; clamping path loss", stacklevel=2)
        return model.fixed_loss_db
    decades = math.log10(distance_m / model.ref_distance_m)
    scale = 1.0 if model.literal else 10.0
    return model.fixed_loss_db + scale * model.alpha * decades


def draw_taps(profile: SuiTapProfile, rng: np.random.Generator, size=()) -> np.ndarray:
    """Complex taps with ``E|tap_i|^2`` equal to the normalized tap powers.

    The first tap is Rician (random LOS phase plus scatter), the rest are
    Rayleigh. ``size`` prepends batch dimensions.
    """
    size = (size,) if isinstance(size, int) else tuple(size)
    n_taps = len(profile.tap_delays_us)
    scatter = (rng.standard_normal(size + (n_taps,))
               + 1j * rng.standard_normal(size + (n_taps,))) / np.sqrt(2.0)
    theta = rng.uniform(0.0, 2.0 * np.pi, size)
    kappa = profile.rician_k_first_tap
    if math.isinf(kappa):
        first = np.exp(1j * theta)
    else:
        first = (np.sqrt(kappa / (kappa + 1.0)) * np.exp(1j * theta)
                 + np.sqrt(1.0 / (kappa + 1.0)) * scatter[..., 0])
    taps = scatter
    taps[..., 0] = first
    return taps * np.sqrt(profile.tap_powers)


def subcarrier_frequencies(n_subcarriers: int, bandwidth_hz: float) -> np.ndarray:
    k = np.arange(n_subcarriers)
    return (k - (n_subcarriers - 1) / 2.0) * (bandwidth_hz / n_subcarriers)


def taps_to_subcarriers(taps: np.ndarray, delays_us, n_subcarriers: int,
                        bandwidth_hz: float) -> np.ndarray:
    """Power gains ``|sum_i tap_i exp(-j 2 pi f_k tau_i)|^2`` per subcarrier."""
    if n_subcarriers < 1:
        raise ValueError("need at least one subcarrier")
    f = subcarrier_frequencies(n_subcarriers, bandwidth_hz)
    tau = np.asarray(delays_us, dtype=float) * 1e-6
    steering = np.exp(-2j * np.pi * np.outer(tau, f))
    return np.abs(taps @ steering) ** 2


def frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(frame_index)])


def hop_scale(config: NetworkConfig, pathloss: PathLossModel) -> float:
    """Factor turning unit-mean fading into normalized gain on one hop."""
    distance = config.end_to_end_distance / config.n_hops
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pl = path_loss_db(pathloss, distance)
    return 10.0 ** (-pl / 10.0) / (config.snr_gap * config.noise_power)


def _frame_gains(config, rng, profile, scale):
    taps = draw_taps(profile, rng, size=config.n_hops)
    fading = taps_to_subcarriers(taps, profile.tap_delays_us, config.n_subcarriers,
                                 config.bandwidth_hz)
    return np.maximum(fading * scale, np.finfo(float).tiny)


def realize_network(config: NetworkConfig, rng: np.random.Generator, *, frame_index: int = 0,
                    profile: SuiTapProfile = SUI3,
                    pathloss: PathLossModel | None = None) -> ChannelRealization:
    pathloss = PathLossModel() if pathloss is None else pathloss
    gains = _frame_gains(config, rng, profile, hop_scale(config, pathloss))
    return ChannelRealization(gains, frame_index)


def draw_frames(config: NetworkConfig, seed: int, n_frames: int | None = None, start: int = 0,
                *, profile: SuiTapProfile = SUI3,
                pathloss: PathLossModel | None = None) -> np.ndarray:
    """Gains for frames ``start .. start+n_frames-1``, shape ``(F, N, K)``."""
    pathloss = PathLossModel() if pathloss is None else pathloss
    n_frames = config.n_frames if n_frames is None else n_frames
    scale = hop_scale(config, pathloss)
    out = np.empty((n_frames, config.n_hops, config.n_subcarriers))
    for i in range(n_frames):
        out[i] = _frame_gains(config, frame_rng(seed, start + i), profile, scale)
    return out


def write_channel_csv(path: str | Path, frames: np.ndarray, start: int = 0) -> None:
    """Dump gains as rows ``frame_index, hop, subcarrier, gain`` (lossless)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "hop", "subcarrier", "gain"])
        for f, frame in enumerate(frames, start=start):
            for n, row in enumerate(frame):
                for k, g in enumerate(row):
                    writer.writerow([f, n, k, repr(float(g))])


def read_channel_csv(path: str | Path) -> list[ChannelRealization]:
    rows: dict[int, dict[tuple[int, int], float]] = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            f = int(rec["frame_index"])
            rows.setdefault(f, {})[(int(rec["hop"]), int(rec["subcarrier"]))] = float(rec["gain"])
    out = []
    for f in sorted(rows):
        cells = rows[f]
        n = 1 + max(h for h, _ in cells)
        k = 1 + max(s for _, s in cells)
        gains = np.empty((n, k))
        if len(cells) != n * k:
            raise ValueError(f"frame {f} is missing entries")
        for (h, s), g in cells.items():
            gains[h, s] = g
        out.append(ChannelRealization(gains, f))
    return out
