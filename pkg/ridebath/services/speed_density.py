"""Network MFD: speed as a function of average density, and its critical density."""
import logging
import math

import numpy as np

from ..errors import DomainError, ModelError
from ..models.kinds import SdrKind
from ..schemas.scenario import SpeedDensityRelation

logger = logging.getLogger(__name__)

SCAN_POINTS = 100_001


def speed_array(rel: SpeedDensityRelation, rho: np.ndarray) -> np.ndarray:
    """Vectorized V(rho), km/h. Negative entries are not checked here."""
    rho = np.asarray(rho, dtype=float)
    if rel.kind is SdrKind.piecewise_min:
        v_free = rel.param("v_free")
        capacity = rel.param("capacity", math.inf)
        wave = rel.param("wave")
        jam = rel.param("jam")
        with np.errstate(divide="ignore", invalid="ignore"):
            plateau = np.where(rho > 0, capacity / rho, np.inf)
            congested = np.where(rho > 0, wave * (jam / rho - 1.0), np.inf)
        v = np.minimum(np.minimum(v_free, plateau), congested)
    elif rel.kind is SdrKind.greenshields:
        v = rel.param("v_free") * (1.0 - rho / rel.param("jam"))
    else:
        rhos, vs = rel.table()
        v = np.interp(rho, rhos, vs, right=vs[-1])
    v = np.maximum(v, 0.0)
    return np.where(rho >= rel.jam_density, 0.0, v)


def speed(rel: SpeedDensityRelation, rho: float) -> float:
    if rho < 0 or not math.isfinite(rho):
        raise DomainError(f"density must be a finite non-negative number, got {rho}")
    return float(speed_array(rel, np.array([rho]))[0])


def _scan_limit(rel: SpeedDensityRelation) -> float:
    if math.isfinite(rel.jam_density):
        return rel.jam_density
    rhos, _ = rel.table()
    return 2.0 * rhos[-1]


def check_unimodal(rel: SpeedDensityRelation, points: int = SCAN_POINTS) -> None:
    """Raise ModelError when the flow rho*V(rho) rises and falls more than once."""
    rho = np.linspace(0.0, _scan_limit(rel), points)
    v = speed_array(rel, rho)
    if np.any(np.diff(v) > 1e-9 * max(rel.free_flow_speed, 1.0)):
        raise ModelError("speed must be non-increasing in density")
    flow = rho * v
    steps = np.diff(flow)
    tol = 1e-9 * max(flow.max(), 1.0)
    signs = np.sign(np.where(np.abs(steps) <= tol, 0.0, steps))
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(np.diff(signs)))
    if changes > 1:
        raise ModelError(f"flow is not unimodal ({changes} direction changes)")


def critical_density(rel: SpeedDensityRelation) -> float:
    """Density of maximum flow; on a flow plateau the largest maximizing density."""
    check_unimodal(rel)
    if rel.kind is SdrKind.greenshields:
        return rel.param("jam") / 2.0
    if rel.kind is SdrKind.piecewise_min:
        v_free = rel.param("v_free")
        capacity = rel.param("capacity", math.inf)
        wave = rel.param("wave")
        jam = rel.param("jam")
        # Free-flow and congested branches cross at the triangle apex.
        apex = wave * jam / (v_free + wave)
        if capacity >= v_free * apex:
            return apex
        return jam - capacity / wave
    rho = np.linspace(0.0, _scan_limit(rel), SCAN_POINTS)
    flow = rho * speed_array(rel, rho)
    peak = flow.max()
    best = np.nonzero(flow >= peak - 1e-12 * max(peak, 1.0))[0]
    return float(rho[best[-1]])
