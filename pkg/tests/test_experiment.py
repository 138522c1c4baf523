import math

import numpy as np
import pytest

from ofdm_relay.channel import draw_frames
from ofdm_relay.config import NetworkConfig
from ofdm_relay.experiment import (RESULT_COLUMNS, SWEEP_FILES, SweepSpec, parse_budget_sweep,
                                   required_power, run_experiment, sweep_and_report, write_results,
                                   write_trace)
from ofdm_relay.static import fpat_rates, upt_rates


@pytest.fixture(scope="module")
def sui_frames():
    cfg = NetworkConfig(n_frames=500)
    return cfg, draw_frames(cfg, 3)


def test_fixed_power_boundary_is_not_outage():
    cfg = NetworkConfig(n_hops=2, n_subcarriers=2, power_budget=2.0, target_rate=math.log(2),
                        n_frames=10)
    frames = np.ones((10, 2, 2))
    for scheme in ("UPT", "FPAT"):
        assert run_experiment(cfg, scheme, frames=frames).outage_rate == 0.0


def test_one_point_fading_enough_power():
    cfg = NetworkConfig(n_hops=1, n_subcarriers=1, target_rate=1.0, n_frames=1000,
                        power_budget=(math.e - 1) * (1 + 1e-12))
    res = run_experiment(cfg, "APT-opt", frames=np.ones((1000, 1, 1)))
    assert res.outage_rate == 0.0
    assert res.avg_power == pytest.approx(math.e - 1)


def test_one_point_fading_short_budget():
    # a long-term budget below the required power allows a fraction P/p of frames
    need = math.e - 1
    cfg = NetworkConfig(n_hops=1, n_subcarriers=1, target_rate=1.0, n_frames=100_000,
                        power_budget=need / 2)
    res = run_experiment(cfg, "APT-opt", frames=np.ones((100_000, 1, 1)))
    assert res.outage_rate == pytest.approx(0.5, abs=0.01)
    assert res.avg_power == pytest.approx(need / 2, rel=0.01)


def test_cross_scheme_sanity(sui_frames):
    cfg, frames = sui_frames
    for r in (1.0, 20.0):
        c = cfg.replace(target_rate=r)
        opt = required_power(frames, "APT-opt", c).p_min
        assert np.all(required_power(frames, "APT-sub", c).p_min >= opt * (1 - 1e-6))
        assert np.all(required_power(frames, "APFT", c).p_min >= opt * (1 - 1e-6))
    assert np.all(fpat_rates(frames, 1e12) >= upt_rates(frames, 1e12) * (1 - 1e-12))


def test_adaptation_beats_fixed_time(sui_frames):
    cfg, frames = sui_frames
    p = np.quantile(required_power(frames, "APT-opt", cfg).p_min, 0.9) / 2
    c = cfg.replace(power_budget=p)
    assert (run_experiment(c, "APT-opt", frames=frames).outage_rate
            <= run_experiment(c, "APFT", frames=frames).outage_rate)


def test_unconverged_frames_only_leave_iteration_stats(sui_frames):
    cfg, frames = sui_frames
    c = cfg.replace(max_ias_passes=2, power_budget=1e12)
    req = required_power(frames, "APT-sub", c)
    assert 0 < (~req.converged).sum() < cfg.n_frames
    res = run_experiment(c, "APT-sub", frames=frames, required=req)
    assert res.n_unconverged == (~req.converged).sum()
    assert res.avg_outer_iters == pytest.approx(req.outer_iters[req.converged].mean())
    # every frame still takes part in the outage statistics
    assert res.loop.on.size == cfg.n_frames


def test_oracle_gaps_small():
    cfg = NetworkConfig(n_hops=2, n_frames=20, target_rate=2.0)
    res = run_experiment(cfg, "APT-opt", 1, oracle=True)
    assert res.oracle_gaps is not None and res.oracle_gaps.size == 10
    assert np.all(np.abs(res.oracle_gaps) < 5e-3)


def test_records_and_csv(tmp_path, sui_frames):
    cfg, frames = sui_frames
    res = run_experiment(cfg.replace(power_budget=3e11), "APT-opt", frames=frames,
                         keep_records=True)
    assert len(res.records) == cfg.n_frames
    assert all(r.outage == (not r.on) for r in res.records)
    path = tmp_path / "trace.csv"
    write_trace(path, res.records, bits=True)
    head = path.read_text().splitlines()[0]
    assert head == "frame,p_min,on,rate,outage,rate_bits"
    out = tmp_path / "res.csv"
    write_results(out, [res])
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(RESULT_COLUMNS)
    assert lines[1].startswith("APT-opt,3,16,1,3e+11,0,500,")


def test_unknown_scheme():
    with pytest.raises(ValueError):
        run_experiment(NetworkConfig(n_frames=1), "XYZ")


def test_frame_shape_check():
    with pytest.raises(ValueError):
        run_experiment(NetworkConfig(n_frames=2), "UPT", frames=np.ones((3, 3, 16)))


def test_budget_sweep_parsing():
    assert parse_budget_sweep("100:120:3") == [100.0, 110.0, 120.0]
    assert parse_budget_sweep("100:120:1") == [100.0]
    with pytest.raises(ValueError):
        parse_budget_sweep("100:120")


def test_empty_sweep_headers_only(tmp_path):
    paths = sweep_and_report(NetworkConfig(n_frames=5), SweepSpec(), tmp_path)
    assert set(paths) == set(SWEEP_FILES)
    for name, path in paths.items():
        assert path.read_text() == ",".join(SWEEP_FILES[name]) + "\n"


def test_sweep_is_deterministic_and_complete(tmp_path):
    cfg = NetworkConfig(n_frames=100)
    spec = SweepSpec(budgets_db=[110.0, 120.0], rates=[1.0, 20.0], hops=[1, 3],
                     schemes=["APT-opt", "FPAT"], alphas=[2.5, 4.0])
    a = sweep_and_report(cfg, spec, tmp_path / "a", seed=4)
    b = sweep_and_report(cfg, spec, tmp_path / "b", seed=4)
    for name in a:
        assert a[name].read_bytes() == b[name].read_bytes()
    assert len(a["outage_vs_power"].read_text().splitlines()) == 1 + 2 * 2 * 2 * 2
    hops_rows = a["power_vs_hops"].read_text().splitlines()[1:]
    assert len(hops_rows) == 2 * 2 * 2
    # one optimal hop count per (alpha, R)
    assert sum(int(r.split(",")[-1]) for r in hops_rows) == 4
