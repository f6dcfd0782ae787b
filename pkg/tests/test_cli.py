import json

import pandas as pd
import pytest

from ridebath import main
from ridebath.errors import NumericFailure
from ridebath.models.kinds import CommandName

SERIES_HEADER = (
    "t_min,v_kmh,rho_veh_per_lane_km,N,n00,n01,n10,w,a00_per_h,p01_per_h,d10_per_h,"
    "z_km,cumF,cumA,cumP,cumD,c"
)
SNAPSHOT_HEADER = "t_min,x_km,k01,k10,K01,K10"


def first_line(path):
    return path.read_text(encoding="utf-8").splitlines()[0]


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_simulate_writes_artifacts(scenario_file, tmp_path):
    out = tmp_path / "db"
    assert main.run(["simulate", str(scenario_file), "--out", str(out)]) == 0
    assert first_line(out / "series.csv") == SERIES_HEADER
    assert first_line(out / "snapshots.csv") == SNAPSHOT_HEADER
    summary = read_json(out / "summary.json")
    assert "gridlock_time_min" not in summary
    assert summary["zbar_min_per_trip"] > 0
    assert summary["max_rho"] <= 125.1 + 1e-6
    assert summary["t_star_min"] > 0
    assert summary["backlog_pax_h"] > 0
    manifest = read_json(out / "manifest.json")
    assert manifest["command"] == "simulate"
    assert manifest["config_hash"] == summary["config_hash"]
    assert manifest["files"] == ["series.csv", "snapshots.csv", "summary.json"]


def test_uncontrolled_summary_reports_gridlock(scenario_file, tmp_path):
    out = tmp_path / "free"
    assert main.run(["simulate", str(scenario_file), "--set", "control.mode=none", "--out", str(out)]) == 0
    summary = read_json(out / "summary.json")
    assert 15.0 < summary["gridlock_time_min"] < 60.0
    assert "zbar_min_per_trip" not in summary


def test_outputs_are_deterministic(scenario_file, tmp_path):
    for name in ("a", "b"):
        assert main.run(["simulate", str(scenario_file), "--out", str(tmp_path / name)]) == 0
    for artifact in ("series.csv", "snapshots.csv", "summary.json"):
        assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()


def test_json_format(scenario_file, tmp_path):
    out = tmp_path / "json"
    assert main.run(["simulate", str(scenario_file), "--format", "json", "--stride", "30", "--out", str(out)]) == 0
    rows = read_json(out / "series.json")
    assert list(rows[0]) == SERIES_HEADER.split(",")
    assert rows[0]["t_min"] == 0.0


def test_invalid_value_exits_with_config_error(scenario_file, tmp_path, caplog):
    code = main.run(["simulate", str(scenario_file), "--set", "dx_km=-1", "--out", str(tmp_path / "x")])
    assert code == 2
    assert "dx_km" in caplog.text


def test_unknown_override_key(scenario_file, tmp_path):
    assert main.run(["simulate", str(scenario_file), "--set", "fleet=3", "--out", str(tmp_path / "x")]) == 2


def test_missing_scenario_file(tmp_path):
    assert main.run(["simulate", str(tmp_path / "nowhere.scn"), "--out", str(tmp_path / "x")]) == 2


def test_numeric_failure_exit_code(scenario_file, tmp_path, monkeypatch):
    def boom(req):
        raise NumericFailure("negative density")

    monkeypatch.setattr(main.COMMANDS[CommandName.simulate], "handler", boom)
    assert main.run(["simulate", str(scenario_file), "--out", str(tmp_path / "x")]) == 3


def test_pool_fixed_size(scenario_file, tmp_path):
    out = tmp_path / "pool"
    args = ["pool", str(scenario_file), "--set", "pooling.mode=fixed", "--set", "pooling.c=2",
            "--set", "c_max=2", "--out", str(out)]
    assert main.run(args) == 0
    assert first_line(out / "c_series.csv") == "t_min,c"
    assert first_line(out / "snapshots.csv") == SNAPSHOT_HEADER + ",h0c,hc0"
    assert read_json(out / "summary.json")["c_source"] == "fixed"


def test_pool_requires_pooling_mode(scenario_file, tmp_path):
    assert main.run(["pool", str(scenario_file), "--out", str(tmp_path / "x")]) == 2


def test_optimality_check_without_alternatives(scenario_file, tmp_path):
    out = tmp_path / "optimality"
    assert main.run(["probe", str(scenario_file), "--alternatives", "0", "--out", str(out)]) == 0
    report = read_json(out / "probe_report.json")
    assert report["verdict"] == "PASS"
    assert report["n_alternatives"] == 0


def test_sweep_writes_one_directory_per_point(scenario_file, tmp_path):
    out = tmp_path / "sweep"
    args = ["sweep", str(scenario_file), "--grid", "demand.scale=20,40", "--stride", "60", "--out", str(out)]
    assert main.run(args) == 0
    index = read_json(out / "sweep_index.json")
    assert [p["directory"] for p in index["points"]] == ["point_000", "point_001"]
    assert [p["overrides"] for p in index["points"]] == [{"demand.scale": "20"}, {"demand.scale": "40"}]
    assert (out / "point_001" / "series.csv").exists()


def test_convergence_report(scenario_file, tmp_path):
    out = tmp_path / "conv"
    args = ["convergence", str(scenario_file), "--set", "demand.scale=60", "--set", "dx_km=0.2", "--out", str(out)]
    assert main.run(args) == 0
    report = read_json(out / "convergence.json")
    assert report["dx_half_km"] == pytest.approx(0.1)
    assert report["passed"]


def test_convergence_while_density_control_binds(scenario_file, tmp_path):
    out = tmp_path / "conv_db"
    assert main.run(["simulate", str(scenario_file), "--out", str(tmp_path / "db")]) == 0
    assert "t_star_min" in read_json(tmp_path / "db" / "summary.json")
    assert main.run(["convergence", str(scenario_file), "--out", str(out)]) == 0
    report = read_json(out / "convergence.json")
    assert report["dx_half_km"] == pytest.approx(0.05)
    assert report["passed"], report["relative_change"]


def test_alternative_idle_fleet_flag(scenario_file, tmp_path):
    out = tmp_path / "fdm"
    assert main.run(["simulate", str(scenario_file), "--paper-fdm", "--out", str(out)]) == 0
    series = pd.read_csv(out / "series.csv")
    assert series["n00"].min() >= 1.0
    assert series["n00"].nunique() > 1
