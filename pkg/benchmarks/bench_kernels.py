"""Time the hot kernels with numba on and off.

Each backend runs in its own interpreter because the switch is read at
import time. Usage: ``python benchmarks/bench_kernels.py [--frames 50]``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from ofdm_relay import _kernels, backend_name
from ofdm_relay.channel import draw_frames
from ofdm_relay.config import NetworkConfig

n_frames, repeats = int(sys.argv[1]), int(sys.argv[2])
frames = draw_frames(NetworkConfig(n_hops=3, n_frames=n_frames), 0)
stream = np.random.default_rng(0).uniform(0, 1, 100 * n_frames)
small = np.random.default_rng(1).uniform(0.1, 2, (2, 2))
cases = {
    "tbs_batch": lambda: _kernels.tbs_batch(frames, 5.0, 1e-6, 1e-8),
    "ias_batch": lambda: _kernels.ias_batch(frames, 5.0, 1e-10, 50),
    "apft_batch": lambda: _kernels.apft_batch(frames, 5.0),
    "threshold_loop": lambda: _kernels.threshold_loop(stream, 0.25, 0.04, 0.25, 1e-12),
    "grid_min_energy": lambda: _kernels.grid_min_energy(small, 2.0, 2000),
}
out = {"backend": backend_name(), "times": {}}
for name, fn in cases.items():
    fn()  # warm-up, includes compilation or cache load
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out["times"][name] = best
print(json.dumps(out))
"""


def run_backend(disable: bool, frames: int, repeats: int) -> dict:
    env = dict(os.environ, OFDM_RELAY_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(frames), str(repeats)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=50)
    parser.add_argument("--repeats", type=int, default=2)
    args = parser.parse_args()
    fast = run_backend(False, args.frames, args.repeats)
    slow = run_backend(True, args.frames, args.repeats)
    print(f"{'kernel':<18}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:<18}{t_fast * 1e3:>10.2f}ms{t_slow * 1e3:>10.2f}ms{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
