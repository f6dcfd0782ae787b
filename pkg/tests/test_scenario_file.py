import pytest

from ridebath.errors import ScenarioError
from ridebath.models.kinds import ControlMode, PoolingMode, SdrKind, SupplyPolicy
from ridebath.services.control import policy_for
from ridebath.services.dynamics import RunOptions, run
from ridebath.services.speed_density import critical_density
from ridebath.utils.hashing import config_hash
from ridebath.utils.scenario_file import (
    apply_overrides, build_scenario, parse_params, parse_scenario, read_scenario_file,
    resolve_key, scenario_to_keys,
)


def test_reference_file(reference_file):
    sc = parse_scenario(reference_file)
    assert sc.lane_km == 10
    assert sc.area_km2 == 5
    assert sc.speed_density.kind is SdrKind.piecewise_min
    assert critical_density(sc.speed_density) == pytest.approx(125.0)
    assert sc.control.mode is ControlMode.db
    assert sc.pooling.mode is PoolingMode.off
    assert sc.supply_policy is SupplyPolicy.balanced
    assert sc.n_cells == 300
    assert sc.eps_rho == pytest.approx(0.1)
    assert sc.release_dt == sc.dt_h


@pytest.mark.parametrize("raw, section, expected", [
    ("kind", "demand", "demand.kind"),
    ("params", "speed_density", "sdr.params"),
    ("lane_km", "network", "lane_km"),
    ("c_max", "pooling", "c_max"),
    ("mode", "pooling", "pooling.mode"),
    ("bogus", "network", None),
])
def test_section_keys(raw, section, expected):
    assert resolve_key(raw, section) == expected


def test_unknown_key_reports_line(tmp_path):
    path = tmp_path / "bad.scn"
    path.write_text("[network]\nlane_km = 10\nlanes = 3\n", encoding="utf-8")
    with pytest.raises(ScenarioError) as info:
        read_scenario_file(path)
    assert info.value.line == 3
    assert ":3:" in str(info.value)
    assert info.value.exit_code == 2


def test_duplicate_key(tmp_path):
    path = tmp_path / "dup.scn"
    path.write_text("lane_km = 10\n# again\nlane_km = 12\n", encoding="utf-8")
    with pytest.raises(ScenarioError, match="duplicate"):
        read_scenario_file(path)


def test_unknown_section(tmp_path):
    path = tmp_path / "sec.scn"
    path.write_text("[fleet]\nsize = 10\n", encoding="utf-8")
    with pytest.raises(ScenarioError, match="unknown section"):
        read_scenario_file(path)


def test_parse_params():
    assert parse_params("slope:100, cap:100,end:1", "demand.params") == (
        ("slope", 100.0), ("cap", 100.0), ("end", 1.0),
    )
    with pytest.raises(ScenarioError):
        parse_params("slope=100", "demand.params")


def test_override_needs_known_key():
    with pytest.raises(ScenarioError):
        apply_overrides({}, {}, [("nonsense", "1")])


def test_bad_value_names_the_key(reference_file):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(reference_file, [("dx_km", "-1")])
    assert info.value.key == "dx_km"


def test_distances_beyond_grid_rejected(reference_file):
    with pytest.raises(ScenarioError, match="increase max_distance_km") as info:
        parse_scenario(reference_file, [("max_distance_km", "3")])
    assert info.value.key == "max_distance_km"


def test_missing_required_key():
    with pytest.raises(ScenarioError, match="missing"):
        build_scenario({"lane_km": "10"}, {})


def test_canonical_keys_rebuild_the_same_scenario(reference_file):
    sc = parse_scenario(reference_file, [("demand.scale", "60")])
    rebuilt = build_scenario(scenario_to_keys(sc), {})
    assert rebuilt == sc
    assert config_hash(rebuilt) == config_hash(sc)


def test_hash_tracks_parameters(reference_file):
    base = parse_scenario(reference_file)
    assert config_hash(base) == config_hash(parse_scenario(reference_file))
    assert config_hash(base) != config_hash(parse_scenario(reference_file, [("lane_km", "11")]))


def test_scaled_reference_city_gridlocks_without_control(scaled_reference_file):
    sc = parse_scenario(scaled_reference_file, [("control.mode", "none")])
    record = run(sc, policy_for(sc), options=RunOptions(snapshots=False))
    assert record.summary.max_rho > record.summary.rho_k
    assert record.summary.gridlocked
