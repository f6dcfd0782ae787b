"""Ride-pooling size policies and the pooled cost objective.

Demand, backlog and the trip ledger count trips; vehicle fields count
vehicles, each admitted vehicle carrying c trips. The trip densities h0c and
hc0 advect with the vehicle fields and carry the size each cohort was
admitted with.
"""
import bisect
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from ..errors import ScenarioError, StateError
from ..models.kinds import PoolingMode
from ..models.policy import ControlPolicy
from ..schemas.scenario import DistanceDistributionModel, Scenario
from .demand import total_demand
from .distances import UniformSource, mean_collecting, mean_delivering

logger = logging.getLogger(__name__)


def saturated_c(f: float, d_c0_at_tstar: float) -> int:
    """Smallest size that lets the capped vehicle in-flux carry the demand."""
    if not d_c0_at_tstar > 0:
        raise StateError("pooling cap undefined: the network has not reached critical density")
    return max(math.ceil(f / d_c0_at_tstar), 1)


def pooled_sources(
    m: DistanceDistributionModel,
    c: int,
    n00: float,
    c_max: Optional[int] = None,
    n_floor: float = 1.0,
) -> Tuple[UniformSource, UniformSource]:
    if c < 1:
        raise ScenarioError(f"pooling size must be at least 1, got {c}", key="pooling.c")
    if c_max is not None and c > c_max:
        raise ScenarioError(f"pooling size {c} exceeds c_max={c_max}", key="c_max")
    return (
        UniformSource(mean_collecting(m, n00, c, n_floor)),
        UniformSource(mean_delivering(m, c)),
    )


class PoolingPolicy:
    """Chooses the pooling size of the vehicles admitted at time t."""

    def size_at(self, t: float, f: float, control: ControlPolicy) -> int:
        raise NotImplementedError


@dataclass
class FixedSize(PoolingPolicy):
    c: int = 1

    def size_at(self, t, f, control):
        return self.c


@dataclass
class SaturatedSize(PoolingPolicy):
    """c = 1 until the first critical crossing, then ceil(f / a_bar) capped at c_max."""
    c_max: int

    def size_at(self, t, f, control):
        if not control.crossed or f <= 0:
            return 1
        if not control.a_bar > 0:
            return self.c_max
        return min(self.c_max, saturated_c(f, control.a_bar))


@dataclass
class ScheduledSize(PoolingPolicy):
    """Blockwise-constant sizes; the last size holds past the final edge."""
    edges: Tuple[float, ...]
    sizes: Tuple[int, ...]

    def size_at(self, t, f, control):
        i = bisect.bisect_right(self.edges, t) - 1
        return self.sizes[min(max(i, 0), len(self.sizes) - 1)]


def policy_for(scenario: Scenario) -> Optional[PoolingPolicy]:
    """Pooling policy named by the scenario; None for a non-pooled run.

    The dp mode has no closed-form policy; the optimizer builds a ScheduledSize.
    """
    mode = scenario.pooling.mode
    if mode is PoolingMode.off:
        return None
    if mode is PoolingMode.fixed:
        return FixedSize(scenario.pooling.c)
    if mode is PoolingMode.saturated:
        return SaturatedSize(scenario.pooling.c_max)
    raise ScenarioError("pooling.mode=dp is resolved by the optimizer", key="pooling.mode")


def cost_integral(trace: pd.DataFrame, pooled: bool, c_series: Optional[Sequence[float]] = None) -> float:
    """Total cost in pax*h from trace rows, trapezoidal in time.

    Non-pooled: integral of w + n01 + n10. Pooled: sum over steps of
    (1{f>0} + n0c + nc0)*c/2*dt, with n0c + nc0 averaged over the step; steps
    without demand carry no matching wait. The pooled cost leaves out the
    backlog, see backlog_area.
    """
    t = trace["t"].to_numpy()
    w = trace["w"].to_numpy()
    active = trace["n01"].to_numpy() + trace["n10"].to_numpy()
    if not pooled:
        return float(trapezoid(w + active, t))
    dt = trace["dt"].to_numpy()[:-1]
    c = trace["c"].to_numpy() if c_series is None else np.asarray(c_series, dtype=float)
    matching = (trace["f"].to_numpy()[:-1] > 0).astype(float)
    mean_active = 0.5 * (active[:-1] + active[1:])
    return float(np.sum((matching + mean_active) * c[:-1] / 2.0 * dt))


def backlog_area(trace: pd.DataFrame) -> float:
    """Passenger-hours spent unassigned, the integral of w."""
    return float(trapezoid(trace["w"].to_numpy(), trace["t"].to_numpy()))


def total_cost(record, c_series: Optional[Sequence[float]] = None) -> Tuple[float, Optional[float]]:
    """(Z, Zbar): total cost and cost per requested trip, Zbar None without demand."""
    Z = cost_integral(record.trace, record.pooled, c_series)
    requested = total_demand(record.scenario.demand, record.scenario.horizon_h)
    return Z, (Z / requested if requested > 0 else None)
