"""Outage-minimizing power and time allocation for OFDM linear relay networks."""

from ._accel import backend_name
from .channel import SUI3, PathLossModel, SuiTapProfile, draw_frames, realize_network
from .config import NetworkConfig, RunOptions
from .experiment import (SCHEMES, ExperimentResult, FrameRecord, SweepSpec, run_experiment,
                         sweep_and_report)
from .ias import ias_solve
from .model import (Allocation, ChannelRealization, HopWaterLevels, end_to_end_rate, per_hop_rate,
                    total_energy, validate_allocation)
from .oracle import brute_force_min_power
from .outage import (ThresholdState, analytic_threshold, budget_for_outage, decide,
                     run_outage_loop, update_threshold)
from .static import apft_min_power, fpat_allocation, fpat_rate, upt_allocation, upt_rate
from .tbs import beta_of_lambda, invert_beta, rho_of_lambda, tbs_solve
from .waterfill import achieved_rate, active_set, water_level_for_rate, waterfill_power

__version__ = "0.1.0"

__all__ = [
    "SCHEMES", "SUI3", "Allocation", "ChannelRealization", "ExperimentResult", "FrameRecord",
    "HopWaterLevels", "NetworkConfig", "PathLossModel", "RunOptions", "SuiTapProfile",
    "SweepSpec", "ThresholdState", "achieved_rate", "active_set", "analytic_threshold",
    "apft_min_power", "backend_name", "beta_of_lambda", "brute_force_min_power",
    "budget_for_outage", "decide", "draw_frames", "end_to_end_rate", "fpat_allocation",
    "fpat_rate", "ias_solve", "invert_beta", "per_hop_rate", "realize_network", "rho_of_lambda",
    "run_experiment", "run_outage_loop", "sweep_and_report", "tbs_solve", "total_energy",
    "update_threshold", "upt_allocation", "upt_rate", "validate_allocation",
    "water_level_for_rate", "waterfill_power",
]
