"""Static problem parameters and the flat ``key = value`` config format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

# controller step is this over the budget unless set explicitly
DEFAULT_STEP_SCALE = 1e-2


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of one linear relay network experiment.

    Power is in noise-normalized linear units (``noise_power`` defaults to 1)
    and rates are in nats per OFDM symbol.
    """

    n_hops: int = 3
    n_subcarriers: int = 16
    power_budget: float = 1.0
    target_rate: float = 1.0
    snr_gap_db: float = 8.2
    noise_power: float = 1.0
    end_to_end_distance: float = 1000.0
    bandwidth_hz: float = 1e6
    outer_tol: float = 1e-6
    inner_tol: float = 1e-8
    mu_tol: float = 1e-10
    # None selects 1e-2 / power_budget
    threshold_step: float | None = None
    n_frames: int = 10_000
    max_ias_passes: int = 50

    def __post_init__(self) -> None:
        if self.n_hops < 1:
            raise ValueError(f"n_hops must be >= 1, got {self.n_hops}")
        if self.n_subcarriers < 1:
            raise ValueError(f"n_subcarriers must be >= 1, got {self.n_subcarriers}")
        if self.n_frames < 1:
            raise ValueError(f"n_frames must be >= 1, got {self.n_frames}")
        for name in ("power_budget", "target_rate", "noise_power", "end_to_end_distance",
                     "bandwidth_hz", "outer_tol", "inner_tol", "mu_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if self.threshold_step is not None and not self.threshold_step > 0:
            raise ValueError(f"threshold_step must be positive, got {self.threshold_step}")

    @property
    def snr_gap(self) -> float:
        return 10.0 ** (self.snr_gap_db / 10.0)

    @property
    def step(self) -> float:
        """Threshold adaptation step actually used by the controller."""
        if self.threshold_step is not None:
            return self.threshold_step
        return DEFAULT_STEP_SCALE / self.power_budget

    def replace(self, **changes: Any) -> NetworkConfig:
        return dataclasses.replace(self, **changes)


@dataclass
class RunOptions:
    """Everything the CLI accepts besides the network itself."""

    network: NetworkConfig = field(default_factory=NetworkConfig)
    scheme: str = "APT-opt"
    seed: int = 0
    out: str | None = None
    trace: str | None = None
    sweep_budget: str | None = None
    alpha_override: float | None = None
    pathloss_literal: bool = False
    oracle: bool = False


# config-file key -> (NetworkConfig field or RunOptions attribute, parser)
_NETWORK_KEYS = {
    "hops": ("n_hops", int),
    "subcarriers": ("n_subcarriers", int),
    "budget": ("power_budget", None),
    "rate": ("target_rate", float),
    "frames": ("n_frames", int),
    "snr_gap_db": ("snr_gap_db", float),
    "noise_power": ("noise_power", float),
    "distance": ("end_to_end_distance", float),
    "bandwidth": ("bandwidth_hz", float),
    "outer_tol": ("outer_tol", float),
    "inner_tol": ("inner_tol", float),
    "mu_tol": ("mu_tol", float),
    "threshold_step": ("threshold_step", float),
    "max_ias_passes": ("max_ias_passes", int),
}
_RUN_KEYS = {
    "scheme": ("scheme", str),
    "seed": ("seed", int),
    "out": ("out", str),
    "trace": ("trace", str),
    "sweep_budget": ("sweep_budget", str),
    "alpha_override": ("alpha_override", float),
    "pathloss_literal": ("pathloss_literal", None),
    "oracle": ("oracle", None),
}


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_power(text: str) -> float:
    """Linear power, or dB when suffixed with ``dB`` (``130dB`` -> 1e13)."""
    stripped = text.strip()
    if stripped.lower().endswith("db"):
        return 10.0 ** (float(stripped[:-2]) / 10.0)
    return float(stripped)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _NETWORK_KEYS and key not in _RUN_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_options(values: dict[str, str]) -> RunOptions:
    """Turn raw string settings (config file merged with CLI) into options."""
    net_kwargs: dict[str, Any] = {}
    run_kwargs: dict[str, Any] = {}
    for key, value in values.items():
        if key in _NETWORK_KEYS:
            name, conv = _NETWORK_KEYS[key]
            net_kwargs[name] = parse_power(value) if key == "budget" else conv(value)
        elif key in _RUN_KEYS:
            name, conv = _RUN_KEYS[key]
            run_kwargs[name] = parse_bool(value) if conv is None else conv(value)
        else:
            raise ValueError(f"unknown setting {key!r}")
    return RunOptions(network=NetworkConfig(**net_kwargs), **run_kwargs)
