from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from quatlag.cli import main, run_verify
from quatlag.simulation import CSV_COLUMNS, csv_text, preset, run


def read_json(path):
    return json.loads(path.read_text())


def test_run_writes_csv_and_metrics(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["run", "--preset", "1.1", "--set", "horizon=5", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text == csv_text(run(preset("1.1", horizon=5.0)))
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    m = read_json(tmp_path / "r.metrics.json")
    assert m["jump_count"] == 1 and m["seed"] == 0
    assert m["jump_times"] == [pytest.approx(0.423)]
    printed = capsys.readouterr().out
    assert "energy_final" in printed and "unwinding_flag" in printed


def test_run_from_config_file_and_dump(tmp_path):
    dumped = tmp_path / "cfg.json"
    assert main(["run", "--preset", "1.2", "--set", "horizon=2", "--seed", "5",
                 "--out", str(tmp_path / "a.csv"), "--dump-config", str(dumped)]) == 0
    cfg = read_json(dumped)
    assert cfg["seed"] == 5 and cfg["horizon"] == 2
    assert main(["run", "--config", str(dumped), "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()


@pytest.mark.parametrize("argv", [
    ["run", "--preset", "7.7"],
    ["run"],
    ["run", "--preset", "1.1", "--config", "x.json"],
    ["run", "--preset", "1.1", "--set", "delta=-1"],
    ["run", "--preset", "1.1", "--set", "nonsense"],
    ["run", "--preset", "1.1", "--set", "bogus=1"],
    ["verify", "--samples", "10"],
    ["check-gains", "--preset", "1.1"],
    ["sweep", "--preset", "1.1", "--param", "q0", "--values", "1"],
    ["sweep", "--preset", "1.1", "--param", "delta", "--values", "a,b"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "o")] if argv[0] in ("run", "sweep") else argv) == 2
    assert capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["fly"])
    assert info.value.code == 2


def test_divergence_exits_3(tmp_path):
    out = tmp_path / "d.csv"
    code = main(["run", "--preset", "1.1", "--set", "Ks=1e5", "--set", "dt=0.1",
                 "--out", str(out)])
    assert code == 3
    assert read_json(tmp_path / "d.metrics.json")["diverged"] is True


def test_verify_report(capsys):
    assert main(["verify", "--samples", "200", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["pass"] and len(data["rows"]) == 14
    assert all(r["max_residual"] <= r["threshold"] for r in data["rows"])
    # The batch-kernel cross-check runs on a fixed subset; every other row sees all samples.
    assert all(r["samples"] == 200 for r in data["rows"] if "batch" not in r["name"])
    assert main(["verify", "--samples", "200"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_detects_injected_fault(capsys):
    assert main(["verify", "--samples", "200", "--fault", "c-sign"]) == 1
    report = run_verify(200, fault="c-sign")
    failed = {r.name for r in report.rows if not r.passed}
    assert "Ddot equals C + C^T" in failed
    assert not report.passed
    capsys.readouterr()


def test_check_gains(capsys):
    assert main(["check-gains", "--preset", "2.1", "--samples", "1000", "--json"]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["pass"] is False and r["threshold"] > r["value"] == 3.0
    assert main(["check-gains", "--preset", "2.1", "--samples", "1000", "--strict"]) == 1
    assert "verdict:   FAIL" in capsys.readouterr().out
    assert main(["check-gains", "--preset", "2.1", "--samples", "1000", "--strict",
                 "--set", "kv=1e6"]) == 0
    capsys.readouterr()
    assert main(["check-gains", "--preset", "2.1-sf", "--samples", "1000", "--json",
                 "--set", "Kd=1e5"]) == 0
    assert json.loads(capsys.readouterr().out)["pass"]


def test_degenerate_sweep_matches_run(tmp_path):
    assert main(["run", "--preset", "1.2", "--set", "horizon=3", "--seed", "4",
                 "--out", str(tmp_path / "single.csv")]) == 0
    assert main(["sweep", "--preset", "1.2", "--set", "horizon=3", "--seed", "4",
                 "--param", "delta", "--values", "0.4", "--seeds", "1",
                 "--out", str(tmp_path / "sw")]) == 0
    swept = tmp_path / "sw" / "delta=0.4" / "seed_4.csv"
    assert swept.read_text() == (tmp_path / "single.csv").read_text()


def test_sweep_aggregates(tmp_path, capsys):
    out = tmp_path / "sw"
    assert main(["sweep", "--preset", "1.2", "--set", "horizon=3", "--param", "delta",
                 "--values", "0,0.4", "--seeds", "2", "--out", str(out)]) == 0
    table = read_json(out / "aggregate.json")
    assert [row["value"] for row in table["rows"]] == [0.0, 0.4]
    per_run = [read_json(out / "delta=0.0" / f"seed_{s}.metrics.json")["energy_final"]
               for s in (0, 1)]
    row = table["rows"][0]
    assert row["runs"] == 2 and row["energy_final"]["mean"] == pytest.approx(np.mean(per_run))
    assert row["energy_final"]["std"] == pytest.approx(np.std(per_run))
    assert (out / "aggregate.csv").read_text().startswith("value,runs,diverged,")
    assert "delta=0.4" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "quatlag", "--help"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    for cmd in ("run", "verify", "check-gains", "sweep"):
        assert cmd in proc.stdout
