from pathlib import Path

import pytest

from ridebath.utils.scenario_file import build_scenario

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

# Coarse grid version of the single-region reference city, demand scaled to load it.
BASE_KEYS = {
    "lane_km": "10",
    "area_km2": "5",
    "horizon_h": "2",
    "max_distance_km": "15",
    "dx_km": "0.1",
    "dt_h": "0.016666666666666666",
    "n00_init": "50",
    "supply_policy": "balanced",
    "demand.kind": "trapezoid_ramp",
    "demand.params": "slope:100, cap:100, end:1",
    "demand.scale": "300",
    "sdr.kind": "piecewise_min",
    "sdr.params": "v_free:30, capacity:750, wave:10, jam:200",
    "ell": "0.63",
    "ell_prime": "1.15",
    "control.mode": "db",
}


def make_scenario(changes=None):
    values = dict(BASE_KEYS)
    values.update(changes or {})
    return build_scenario(values, {})


def write_scenario(path: Path, changes=None) -> Path:
    values = dict(BASE_KEYS)
    values.update(changes or {})
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8")
    return path


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def controlled():
    return make_scenario()


@pytest.fixture
def uncontrolled():
    return make_scenario({"control.mode": "none"})


@pytest.fixture
def scenario_file(tmp_path):
    return write_scenario(tmp_path / "city.scn")


@pytest.fixture
def reference_file():
    return SCENARIO_DIR / "paper_s5.scn"


@pytest.fixture
def scaled_reference_file():
    return SCENARIO_DIR / "paper_s5_scaled.scn"
