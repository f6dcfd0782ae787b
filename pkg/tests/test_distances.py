import math

import numpy as np
import pytest
from scipy.integrate import quad

from ridebath.errors import DomainError, ScenarioError, StateError
from ridebath.models.kinds import Stage
from ridebath.schemas.scenario import DistanceDistributionModel
from ridebath.services.distances import (
    UniformSource, desired_distance_ccdf, mean_collecting, mean_delivering,
)
from ridebath.services.pooling import pooled_sources


@pytest.fixture
def model():
    return DistanceDistributionModel(ell=0.63, ell_prime=1.15, area=5.0)


def test_means(model):
    assert mean_collecting(model, 50) == pytest.approx(0.63 * math.sqrt(0.1))
    assert mean_delivering(model) == pytest.approx(1.15 * math.sqrt(5.0))


def test_ccdf_endpoints(model):
    B = mean_delivering(model)
    assert desired_distance_ccdf(model, 50, 1, Stage.delivering, 0.0) == 1.0
    assert desired_distance_ccdf(model, 50, 1, Stage.delivering, B) == pytest.approx(0.5)
    assert desired_distance_ccdf(model, 50, 1, Stage.delivering, 2 * B) == pytest.approx(0.0, abs=1e-12)
    assert desired_distance_ccdf(model, 50, 1, Stage.delivering, 3 * B) == 0.0


def test_ccdf_integrates_to_the_mean():
    src = UniformSource(1.3)
    area, _ = quad(lambda x: float(src.ccdf(x)), 0.0, src.upper)
    assert area == pytest.approx(1.3, rel=1e-9)


def test_cell_weights_follow_the_mid_step_displacement():
    x = np.arange(11) * 0.1          # grid ends at 1 km, support reaches 2 km
    src = UniformSource(1.0)
    w = src.cell_weights(x)
    assert w.sum() == pytest.approx(1.0 - 0.05 / 2.0)
    assert w[-1] == 0.0
    assert w[-2] == pytest.approx(1.0 - 0.95 / 2.0)
    np.testing.assert_allclose(src.injection_ccdf(x)[:-1], 1.0 - (x[:-1] + 0.05) / 2.0)


def test_negative_distance_rejected(model):
    with pytest.raises(DomainError):
        desired_distance_ccdf(model, 50, 1, Stage.collecting, -0.1)


def test_collecting_ccdf_needs_idle_vehicles(model):
    with pytest.raises(StateError):
        desired_distance_ccdf(model, 0.5, 1, Stage.collecting, 0.1)


def test_pooled_sources_scale_with_size(model):
    col1, del1 = pooled_sources(model, 1, 50)
    col4, del4 = pooled_sources(model, 4, 50)
    assert col4.mean == pytest.approx(4 * col1.mean)
    assert del4.mean == pytest.approx(2 * del1.mean)
    _, del2 = pooled_sources(model, 2, 50)
    assert del2.mean == pytest.approx(1.15 * math.sqrt(10.0))


def test_pooled_size_above_limit_rejected(model):
    with pytest.raises(ScenarioError):
        pooled_sources(model, 4, 50, c_max=3)
