import csv
import subprocess
import sys

import pytest

from ofdm_relay.cli import main


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_results(tmp_path):
    out = tmp_path / "res.csv"
    assert main(["run", "--frames", "200", "--scheme", "UPT,APT-opt", "--budget", "115dB",
                 "--out", str(out)]) == 0
    got = rows(out)
    assert [r["scheme"] for r in got] == ["UPT", "APT-opt"]
    assert float(got[0]["P_budget"]) == pytest.approx(10 ** 11.5)
    assert got[1]["n_frames"] == "200"


def test_budget_sweep(tmp_path):
    out = tmp_path / "res.csv"
    assert main(["run", "--frames", "50", "--scheme", "all", "--sweep-budget", "100:120:3",
                 "--out", str(out)]) == 0
    got = rows(out)
    assert len(got) == 5 * 3
    assert sorted({float(r["P_budget"]) for r in got}) == pytest.approx([1e10, 1e11, 1e12])


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("hops = 2\nframes = 30\nscheme = FPAT\nbudget = 1e11\n")
    out = tmp_path / "res.csv"
    assert main(["run", "--config", str(cfg), "--hops", "4", "--out", str(out)]) == 0
    (row,) = rows(out)
    assert (row["scheme"], row["N"], row["n_frames"]) == ("FPAT", "4", "30")


def test_traces(tmp_path):
    trace, thr = tmp_path / "t.csv", tmp_path / "s.csv"
    assert main(["run", "--frames", "40", "--scheme", "APFT", "--budget", "1e11",
                 "--trace", str(trace), "--threshold-trace", str(thr), "--out",
                 str(tmp_path / "r.csv")]) == 0
    assert len(rows(trace)) == 40 and len(rows(thr)) == 40


def test_dump_channels(tmp_path):
    out = tmp_path / "ch.csv"
    assert main(["dump-channels", "--frames", "2", "--hops", "2", "--subcarriers", "3",
                 "--out", str(out)]) == 0
    assert len(rows(out)) == 2 * 2 * 3


def test_sweep_command(tmp_path, capsys):
    assert main(["sweep", "--out-dir", str(tmp_path), "--frames", "30", "--rates", "1",
                 "--hop-list", "1,2", "--sweep-budget", "110:110:1", "--alphas", "2.5"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4
    assert len(rows(tmp_path / "power_vs_hops.csv")) == 2


@pytest.mark.parametrize("argv", [
    ["run", "--scheme", "NOPE", "--frames", "5"],
    ["run", "--sweep-budget", "1:2", "--frames", "5"],
    ["run", "--hops", "0"],
    ["run", "--config", "/nonexistent/file.cfg"],
    ["run", "--frames", "5", "--scheme", "UPT", "--threshold-trace", "/tmp/x.csv"],
])
def test_structural_errors_exit_nonzero(argv, capsys):
    assert main(argv) != 0
    assert "error" in capsys.readouterr().err


def test_bad_flag_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--no-such-flag"])
    assert exc.value.code != 0


def test_byte_identical_reruns(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        main(["run", "--frames", "150", "--scheme", "all", "--seed", "11", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_console_script_entry(tmp_path):
    out = tmp_path / "r.csv"
    proc = subprocess.run([sys.executable, "-m", "ofdm_relay.cli", "run", "--frames", "10",
                           "--scheme", "UPT", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
