"""Density-based (DB) admission control.

While the network is below critical density the matching rate follows demand
plus backlog release, limited by the spare room (rho_k - rho)*L/dt plus the
vehicles delivered over the same interval. Once the density reaches rho_k
the rate is capped at a_bar, the out-flux of delivering vehicles observed at
that first crossing.
"""
import logging
from dataclasses import replace

from ..models.kinds import ControlMode
from ..models.policy import ControlPolicy
from ..models.state import Observation
from ..schemas.scenario import Scenario
from .speed_density import critical_density

logger = logging.getLogger(__name__)


def policy_for(scenario: Scenario, recompute_cap: bool = False, rho_k: float = None) -> ControlPolicy:
    return ControlPolicy(
        mode=scenario.control.mode,
        rho_k=critical_density(scenario.speed_density) if rho_k is None else rho_k,
        eps_rho=scenario.eps_rho,
        release_dt=scenario.release_dt,
        lane_km=scenario.lane_km,
        recompute_cap=recompute_cap,
    )


def scheduled_policy(base: ControlPolicy, block_edges, fractions) -> ControlPolicy:
    return replace(
        base,
        mode=ControlMode.scheduled,
        block_edges=tuple(block_edges),
        fractions=tuple(fractions),
        a_bar=None,
        t_star=None,
    )


def observe_crossing(p: ControlPolicy, obs: Observation) -> bool:
    """Record t* and a_bar at the first critical crossing. Returns True when saturated."""
    saturated = obs.rho >= p.rho_k - p.eps_rho
    if saturated and (p.a_bar is None or (p.recompute_cap and p.mode is ControlMode.db)):
        first = p.a_bar is None
        p.a_bar = obs.k10_at_0 * obs.v
        if first:
            p.t_star = obs.t
            logger.info("critical density reached at t*=%.4f h, a_bar=%.3f veh/h", obs.t, p.a_bar)
    return saturated


def admission_rate(p: ControlPolicy, obs: Observation, dt_j: float, c: int = 1) -> float:
    """Vehicles per hour moved from idle to collecting.

    Demand and backlog are in trips; with pooling size c one vehicle carries c of them.
    """
    saturated = observe_crossing(p, obs)
    if p.mode is ControlMode.none:
        return obs.f / c
    wanted = (obs.f + obs.w / p.release_dt) / c
    if p.mode is ControlMode.scheduled:
        return p.fraction_at(obs.t) * wanted
    if saturated:
        return min(wanted, p.a_bar)
    # Room left below rho_k plus the vehicles delivered meanwhile.
    spare = (p.rho_k - obs.rho) * p.lane_km / p.release_dt + obs.d10
    return min(wanted, spare)
