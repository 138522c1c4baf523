"""Channel, allocation and water-level value types plus rate/energy evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _frozen(array, dtype=float) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChannelRealization:
    """Noise- and gap-normalized gains of one frame, shape ``(n_hops, n_subcarriers)``."""

    gains: np.ndarray
    frame_index: int = 0

    def __post_init__(self) -> None:
        gains = _frozen(self.gains)
        if gains.ndim != 2 or gains.size == 0:
            raise ValueError(f"gains must be a non-empty 2-D array, got shape {gains.shape}")
        if not np.all(np.isfinite(gains)) or np.any(gains <= 0):
            raise ValueError("gains must be strictly positive and finite")
        if self.frame_index < 0:
            raise ValueError("frame_index must be non-negative")
        object.__setattr__(self, "gains", gains)

    @property
    def n_hops(self) -> int:
        return self.gains.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.gains.shape[1]


@dataclass(frozen=True)
class Allocation:
    """Per-hop time shares and per-subcarrier powers."""

    time_shares: np.ndarray
    powers: np.ndarray

    def __post_init__(self) -> None:
        rho = _frozen(self.time_shares)
        powers = _frozen(self.powers)
        if rho.ndim != 1 or powers.ndim != 2 or powers.shape[0] != rho.size:
            raise ValueError(
                f"shape mismatch: time_shares {rho.shape}, powers {powers.shape}")
        object.__setattr__(self, "time_shares", rho)
        object.__setattr__(self, "powers", powers)

    @property
    def energies(self) -> np.ndarray:
        """Energy per hop and subcarrier, ``rho_n * p_{k,n}``."""
        out = self.time_shares[:, None] * self.powers
        out.setflags(write=False)
        return out

    @property
    def n_hops(self) -> int:
        return self.time_shares.size


@dataclass(frozen=True)
class HopWaterLevels:
    levels: np.ndarray
    active_counts: np.ndarray
    active_sets: tuple[np.ndarray, ...]

    @classmethod
    def from_levels(cls, gains: np.ndarray, levels: np.ndarray) -> HopWaterLevels:
        """Active sets follow the strict rule ``g > 1/level``."""
        levels = np.asarray(levels, dtype=float)
        sets = tuple(_frozen(np.flatnonzero(gains[n] * levels[n] > 1.0), dtype=np.int64)
                     for n in range(levels.size))
        counts = np.array([s.size for s in sets], dtype=np.int64)
        return cls(_frozen(levels), _frozen(counts, dtype=np.int64), sets)


def _check_dims(alloc: Allocation, channel: ChannelRealization) -> None:
    if alloc.powers.shape != channel.gains.shape:
        raise ValueError(
            f"allocation shape {alloc.powers.shape} does not match channel {channel.gains.shape}")


def per_hop_rate(alloc: Allocation, channel: ChannelRealization, hop: int) -> float:
    """Nats per OFDM symbol delivered over ``hop``: rho * sum ln(1 + g p)."""
    _check_dims(alloc, channel)
    if not 0 <= hop < alloc.n_hops:
        raise IndexError(f"hop {hop} out of range for {alloc.n_hops} hops")
    rho = alloc.time_shares[hop]
    if rho == 0:
        return 0.0
    return float(rho * np.log1p(channel.gains[hop] * alloc.powers[hop]).sum())


def hop_rates(alloc: Allocation, channel: ChannelRealization) -> np.ndarray:
    _check_dims(alloc, channel)
    return np.array([per_hop_rate(alloc, channel, n) for n in range(alloc.n_hops)])


def end_to_end_rate(alloc: Allocation, channel: ChannelRealization) -> float:
    """Bottleneck rate: min over hops of :func:`per_hop_rate`."""
    return float(hop_rates(alloc, channel).min())


def total_energy(alloc: Allocation) -> float:
    return float(alloc.energies.sum())


@dataclass
class ValidationReport:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate_allocation(alloc: Allocation, channel: ChannelRealization, target: float,
                        slack: float = 1e-6) -> ValidationReport:
    """Check the time constraint, non-negative powers and every hop's rate.

    Hops are named 1-based in the messages.
    """
    problems = []
    if alloc.powers.shape != channel.gains.shape:
        return ValidationReport(False, [
            f"shape mismatch: allocation {alloc.powers.shape} vs channel {channel.gains.shape}"])
    rho_sum = float(alloc.time_shares.sum())
    if abs(rho_sum - 1.0) > slack:
        problems.append(f"time constraint violated: sum of time shares = {rho_sum:.12g}")
    if np.any(alloc.time_shares < 0) or np.any(alloc.time_shares > 1):
        problems.append("time share outside [0, 1]")
    if np.any(alloc.powers < 0) or not np.all(np.isfinite(alloc.powers)):
        problems.append("negative or non-finite power")
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = hop_rates(alloc, channel)
    floor = target * (1.0 - slack)
    for n, r in enumerate(rates):
        if r < floor:
            problems.append(f"rate deficit on hop {n + 1}: {r:.12g} < {target:.12g}")
    return ValidationReport(not problems, problems)
