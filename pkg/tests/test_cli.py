import subprocess
import sys

import numpy as np
import pytest

from padeadi.cli import main
from padeadi.snapshot import read_slice, read_snapshot


def write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_info(capsys):
    assert main(["info"]) == 0
    out = capsys.readouterr().out
    assert "kernel backend" in out and "0.577350269189626" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padeadi", "info"], capture_output=True, text=True)
    assert proc.returncode == 0 and "padeadi" in proc.stdout


def test_missing_config_exits_2(tmp_path, capsys):
    assert main(["run", str(tmp_path / "none.ini")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_cfl_violation_exits_2(tmp_path):
    cfg = write(tmp_path, "[problem]\nexample = 1\n[time]\ntau = 0.25\n")
    assert main(["run", str(cfg)]) == 2


def test_divergence_exits_3(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nexample = 1\n[time]\ntau = 0.25\nT = 5\n")
    assert main(["run", str(cfg), "--override"]) == 3
    assert "DIVERGED" in capsys.readouterr().out


def test_run_writes_snapshots_and_slices(tmp_path, capsys):
    cfg = write(tmp_path, """
[problem]
example = 2
[grid]
h = pi/10
[time]
tau = 0.05
T = 0.2
[output]
dir = results
snapshots = 0.1, 0.2
slices = x:6, z:1
""")
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "max-norm error" in out
    files = sorted(p.name for p in (tmp_path / "results").iterdir())
    assert files == ["slice_x6_t0.1000.csv", "slice_x6_t0.2000.csv", "slice_z1_t0.1000.csv",
                     "slice_z1_t0.2000.csv", "snapshot_t0.1000.wf3d", "snapshot_t0.2000.wf3d"]
    snap = read_snapshot(tmp_path / "results" / "snapshot_t0.2000.wf3d")
    assert snap.shape == (11, 11, 11) and snap.t == pytest.approx(0.2)
    axis, idx, t, plane = read_slice(tmp_path / "results" / "slice_x6_t0.2000.csv")
    np.testing.assert_array_equal(plane, snap.data[5])


def test_convergence_table_and_csv(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nexample = 2\n")
    csv = tmp_path / "t.csv"
    assert main(["convergence", str(cfg), "--schedule", "pi/8:1/10, pi/16:1/20", "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert "pi/8" in out and "pi/16" in out
    lines = csv.read_text().splitlines()
    assert len(lines) == 3


def test_convergence_bad_schedule(tmp_path):
    cfg = write(tmp_path, "[problem]\nexample = 2\n")
    assert main(["convergence", str(cfg), "--schedule", "pi/8"]) == 2


def test_stability_scan(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nexample = 1\n")
    assert main(["stability-scan", str(cfg), "--ratios", "0.3", "--taus", "1/10,1/20"]) == 0
    assert "tau/h = 0.300000" in capsys.readouterr().out


def test_energy_probe(tmp_path, capsys):
    cfg = write(tmp_path, "[problem]\nexample = 2\n")
    assert main(["energy-probe", str(cfg), "--nodes", "6", "--steps", "20"]) == 0
    assert "coercivity floor holds" in capsys.readouterr().out
    assert main(["energy-probe", str(cfg), "--nodes", "40"]) == 2
