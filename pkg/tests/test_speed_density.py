import numpy as np
import pytest

from ridebath.errors import DomainError, ModelError
from ridebath.models.kinds import SdrKind
from ridebath.schemas.scenario import SpeedDensityRelation
from ridebath.services.speed_density import check_unimodal, critical_density, speed, speed_array


def relation(kind, **params):
    return SpeedDensityRelation(kind=kind, parameters=tuple((k, float(v)) for k, v in params.items()))


@pytest.fixture
def city():
    return relation(SdrKind.piecewise_min, v_free=30, capacity=750, wave=10, jam=200)


def table(rhos, vs):
    params = {}
    for i, (r, v) in enumerate(zip(rhos, vs)):
        params[f"rho_{i}"] = r
        params[f"v_{i}"] = v
    return relation(SdrKind.tabulated, **params)


@pytest.mark.parametrize("rho, expected", [(0, 30), (50, 15), (125, 6), (200, 0), (250, 0)])
def test_piecewise_speed(city, rho, expected):
    assert speed(city, rho) == pytest.approx(expected)


def test_negative_density_rejected(city):
    with pytest.raises(DomainError):
        speed(city, -1.0)


def test_critical_density_of_reference_city(city):
    assert critical_density(city) == pytest.approx(125.0)


def test_greenshields_critical_density():
    rel = relation(SdrKind.greenshields, v_free=40, jam=100)
    assert critical_density(rel) == pytest.approx(50.0)
    assert speed(rel, 50) == pytest.approx(20.0)


def test_triangle_without_capacity_peaks_at_apex():
    rel = relation(SdrKind.piecewise_min, v_free=30, wave=10, jam=200)
    assert critical_density(rel) == pytest.approx(50.0)


def test_tabulated_matches_brute_force_scan():
    rhos = [0, 20, 40, 60, 80, 100, 120, 140, 160, 180]
    vs = [30, 28, 25, 21, 16, 11, 7, 4, 2, 0]
    rel = table(rhos, vs)
    grid = np.linspace(0.0, 180.0, 100_001)
    flow = grid * np.interp(grid, rhos, vs)
    brute = grid[np.argmax(flow)]
    assert abs(critical_density(rel) - brute) <= 180.0 / 1e5
    assert critical_density(rel) == pytest.approx(72.0, abs=0.01)


def test_tabulated_speeds_must_not_increase():
    with pytest.raises(ValueError):
        table([0, 10, 20], [10, 12, 0])


def test_bimodal_flow_rejected():
    rel = table([0, 10, 20, 30, 40], [10, 10, 3, 3, 0])
    with pytest.raises(ModelError):
        check_unimodal(rel)
    with pytest.raises(ModelError):
        critical_density(rel)


def test_random_parametric_relations_are_unimodal():
    rng = np.random.default_rng(7)
    for _ in range(20):
        jam = rng.uniform(80, 250)
        v_free = rng.uniform(10, 60)
        if rng.random() < 0.5:
            rel = relation(SdrKind.greenshields, v_free=v_free, jam=jam)
        else:
            rel = relation(
                SdrKind.piecewise_min,
                v_free=v_free, capacity=rng.uniform(100, 1500), wave=rng.uniform(5, 20), jam=jam,
            )
        check_unimodal(rel)
        rho_k = critical_density(rel)
        assert 0.0 < rho_k <= jam
        # rho_k maximizes flow over a fine scan
        grid = np.linspace(0.0, jam, 20_001)
        flow = grid * speed_array(rel, grid)
        assert rho_k * speed(rel, rho_k) >= flow.max() * (1 - 1e-6)
