"""Interactive bathtub dynamics on a remaining-distance grid.

Every step moves the density fields exactly one cell toward x = 0, so the
step length is dt_j = dx / v and the vehicles in cell 0 leave the state
during the step. Cohorts admitted during a step are injected at their mid-step
displacement, and the part of a cohort that finishes inside the step moves
on at once, so mass bookkeeping closes to round-off.
"""
import copy
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from ..config import get_settings
from ..errors import NumericFailure, StateError
from ..models.kinds import ControlMode, SupplyPolicy
from ..models.policy import ControlPolicy
from ..models.record import RunRecord, RunSummary
from ..models.state import GridState, Observation, PooledGridState, StepOutcome, Transfers
from ..schemas.scenario import Scenario
from .control import admission_rate, policy_for
from .demand import demand_at, total_demand
from .distances import UniformSource, mean_collecting, mean_delivering
from .pooling import policy_for as pooling_policy_for
from .speed_density import speed_array

logger = logging.getLogger(__name__)

State = Union[GridState, PooledGridState]

# Observables interpolated linearly between step states on the base grid.
STATE_COLUMNS = ("rho", "N", "n00", "n01", "n10", "w", "z", "cumF", "cumA", "cumP", "cumD")
# Rates held constant over the step that produced them.
RATE_COLUMNS = ("v", "a00", "p01", "d10", "c")


@dataclass
class RunOptions:
    paper_fdm: bool = False
    recompute_cap: bool = False
    drain: bool = False
    stride: Optional[int] = None
    snapshots: bool = True


def _shift(a: np.ndarray) -> np.ndarray:
    """Move every cell one step toward x = 0; cell 0 leaves, the boundary cell empties."""
    return np.append(a[1:], 0.0)


def boundary_fluxes(s: GridState, v: float) -> Tuple[float, float]:
    """Pick-up and drop-off rates (vehicles/h) at zero remaining distance."""
    return float(s.k01[0]) * v, float(s.k10[0]) * v


def advect_step(
    s: State,
    a00: float,
    dt_j: float,
    sources: Tuple[UniformSource, UniformSource],
    x: np.ndarray,
    c: int = 1,
) -> Tuple[State, Transfers]:
    """One exact-shift update of all distance fields.

    Admissions arrive evenly over the step, so the cohort A = a00 * dt_j is
    injected where it stands at step end: k'[i] = k[i+1] + A * w_i / dx and
    K'[i] = K[i+1] + A * Phi(x_i + dx/2). The share 1 - Phi(dx/2) reaches its
    pick-up within the step and joins the vehicles leaving cell 0 as the
    delivering cohort, which is injected the same way.
    """
    dx = x[1] - x[0]
    col, dlv = sources
    phi_col, phi_del = col.injection_ccdf(x), dlv.injection_ccdf(x)
    w_col, w_del = col.cell_weights(x), dlv.cell_weights(x)
    admitted = a00 * dt_j
    picked = float(s.k01[0]) * dx + admitted * (1.0 - phi_col[0])
    delivered = float(s.k10[0]) * dx + picked * (1.0 - phi_del[0])

    changes = dict(
        k01=_shift(s.k01) + admitted * w_col / dx,
        K01=_shift(s.K01) + admitted * phi_col,
        k10=_shift(s.k10) + picked * w_del / dx,
        K10=_shift(s.K10) + picked * phi_del,
    )
    trips_picked, trips_delivered = picked, delivered
    if isinstance(s, PooledGridState):
        trips_picked = float(s.h0c[0]) * dx + c * admitted * (1.0 - phi_col[0])
        trips_delivered = float(s.hc0[0]) * dx + trips_picked * (1.0 - phi_del[0])
        changes["h0c"] = _shift(s.h0c) + c * admitted * w_col / dx
        changes["hc0"] = _shift(s.hc0) + trips_picked * w_del / dx

    for name, field in changes.items():
        if np.any(field < 0):
            raise NumericFailure(f"negative {name} after advection at t={s.t:.6f} h")
    return s.evolve(**changes), Transfers(picked, delivered, trips_picked, trips_delivered)


class Simulator:
    """Runs one scenario under one control and pooling policy.

    The simulator owns the mutable policy state of its run (t*, a_bar); use
    fork() to branch a run from an intermediate state.
    """

    def __init__(
        self,
        scenario: Scenario,
        control: Optional[ControlPolicy] = None,
        pooling=None,
        options: Optional[RunOptions] = None,
    ):
        self.scenario = scenario
        self.options = options or RunOptions()
        self.control = control or policy_for(scenario, recompute_cap=self.options.recompute_cap)
        self.pooling = pooling
        self.x = np.arange(scenario.n_cells + 1) * scenario.dx_km
        self.settings = get_settings()
        self._tail_warned = False
        self._gridlock_time: Optional[float] = None

    @property
    def pooled(self) -> bool:
        return self.pooling is not None

    def fork(self, pooling=None) -> "Simulator":
        twin = copy.copy(self)
        twin.control = copy.deepcopy(self.control)
        twin.pooling = copy.deepcopy(self.pooling) if pooling is None else pooling
        return twin

    def initial_state(self) -> State:
        cls = PooledGridState if self.pooled else GridState
        return cls.empty(len(self.x), self.scenario.n00_init)

    def speed(self, rho: float) -> float:
        return float(speed_array(self.scenario.speed_density, np.array([rho]))[0])

    def _sources(self, s: State, c: int) -> Tuple[UniformSource, UniformSource]:
        sc = self.scenario
        col = UniformSource(mean_collecting(sc.distances, s.n00, c, sc.n_floor))
        occupancy = 1.0
        if isinstance(s, PooledGridState):
            # Cohorts keep the size they were admitted with; the exiting cell tells it.
            occupancy = float(s.h0c[0]) / float(s.k01[0]) if s.k01[0] > 0 else float(c)
        dlv = UniformSource(mean_delivering(sc.distances, occupancy))
        if not self._tail_warned:
            tail = max(col.tail_beyond(sc.max_distance_km), dlv.tail_beyond(sc.max_distance_km))
            if tail > sc.support_tol:
                self._tail_warned = True
                logger.warning(
                    "source mass %.2e beyond max_distance_km at t=%.4f h lumped into the last cell",
                    tail, s.t,
                )
        return col, dlv

    def _frozen_step(self, s: State, v: float) -> Tuple[State, StepOutcome]:
        dt = self.scenario.dt_h
        if self._gridlock_time is None:
            self._gridlock_time = s.t
            logger.warning("gridlock at t=%.4f h (v=%.4f km/h)", s.t, v)
        active = s.n01 + s.n10
        new = s.evolve(
            j=s.j + 1,
            t=s.t + dt,
            cost_accum=s.cost_accum + (s.w + active) * dt,
            pooled_cost_accum=s.pooled_cost_accum + active * s.c_now / 2.0 * dt,
            gridlocked=True,
        )
        return new, StepOutcome(dt_j=dt, m=1, v=v, a00=0.0, p01=0.0, d10=0.0, gridlocked=True, c=s.c_now)

    def step(self, s: State) -> Tuple[State, StepOutcome]:
        sc = self.scenario
        rho = s.rho(sc.lane_km)
        v = self.speed(rho)
        if s.gridlocked or v <= sc.v_floor_kmh:
            return self._frozen_step(s, v)

        dt_j = sc.dx_km / v
        m = max(1, int(round(dt_j / sc.dt_h)))
        f = demand_at(sc.demand, s.t) if s.t < sc.horizon_h else 0.0
        c = self.pooling.size_at(s.t, f, self.control) if self.pooled else 1

        p01_edge, d10_edge = boundary_fluxes(s, v)
        obs = Observation(t=s.t, rho=rho, f=f, w=s.w, d10=d10_edge, v=v, k10_at_0=float(s.k10[0]))
        a00 = admission_rate(self.control, obs, dt_j, c)
        if self.control.mode is ControlMode.db:
            rho_k, eps = self.control.rho_k, self.control.eps_rho
            # Net in-flow over one step fills at most the room left below rho_k
            # (rho_k + eps once saturated).
            limit = rho_k if rho < rho_k - eps else rho_k + eps
            a00 = min(a00, d10_edge + (limit * sc.lane_km - s.N) / dt_j)
        a00 = min(a00, (f + s.w / dt_j) / c)
        if sc.supply_policy is SupplyPolicy.fixed_fleet and not self.options.paper_fdm:
            a00 = min(a00, s.n00 / dt_j + d10_edge)
        a00 = max(a00, 0.0)

        sources = self._sources(s, c)
        new, moved = advect_step(s, a00, dt_j, sources, self.x, c)
        p01, d10 = moved.picked / dt_j, moved.delivered / dt_j

        w = max(0.0, s.w + (f - c * a00) * dt_j)
        if self.options.paper_fdm:
            room = self.control.rho_k * sc.lane_km - new.n01 - new.n10
            n00 = max(sc.n_floor, min(f * sc.dt_h + w, room))
            supply = (n00 - s.n00) / dt_j - d10 + a00
        elif sc.supply_policy is SupplyPolicy.balanced:
            n00 = s.n00
            supply = a00 - d10
        else:
            n00 = max(0.0, s.n00 + (d10 - a00) * dt_j)
            supply = 0.0

        active_before = s.n01 + s.n10
        active = 0.5 * (active_before + new.n01 + new.n10)
        waiting = 0.5 * (s.w + w)
        matching = 1.0 if f > 0 else 0.0
        new = new.evolve(
            j=s.j + 1,
            t=s.t + dt_j,
            n00=n00,
            w=w,
            z=s.z + v * dt_j,
            cumF=s.cumF + f * dt_j,
            cumA=s.cumA + c * a00 * dt_j,
            cumP=s.cumP + moved.trips_picked,
            cumD=s.cumD + moved.trips_delivered,
            cost_accum=s.cost_accum + (waiting + active) * dt_j,
            pooled_cost_accum=s.pooled_cost_accum + (matching + active) * c / 2.0 * dt_j,
            c_now=c,
        )
        if not (math.isfinite(new.n00) and math.isfinite(new.w) and math.isfinite(new.n01) and math.isfinite(new.n10)):
            raise NumericFailure(
                f"non-finite state after step {s.j} at t={s.t:.6f} h "
                f"(v={v}, a00={a00}, n00={new.n00}, w={new.w})"
            )
        outcome = StepOutcome(
            dt_j=dt_j, m=m, v=v, a00=a00, p01=p01, d10=d10, gridlocked=False,
            f=f, c=c, supply=supply,
            mean_col=sources[0].mean, mean_del=sources[1].mean,
            trips_picked=moved.trips_picked / dt_j, trips_delivered=moved.trips_delivered / dt_j,
            p01_edge=p01_edge, d10_edge=d10_edge,
        )
        return new, outcome

    def _trace_row(self, s: State, out: Optional[StepOutcome]) -> dict:
        sc = self.scenario
        row = dict(
            t=s.t, rho=s.rho(sc.lane_km), N=s.N, n00=s.n00, n01=s.n01, n10=s.n10,
            w=s.w, z=s.z, cumF=s.cumF, cumA=s.cumA, cumP=s.cumP, cumD=s.cumD,
            cost=s.cost_accum, pooled_cost=s.pooled_cost_accum,
        )
        if isinstance(s, PooledGridState):
            row.update(trips_col=s.trips_collecting(sc.dx_km), trips_del=s.trips_delivering(sc.dx_km))
        if out is None:
            out = StepOutcome(dt_j=0.0, m=0, v=self.speed(row["rho"]), a00=0.0, p01=0.0, d10=0.0,
                              gridlocked=s.gridlocked, c=s.c_now)
        row.update(
            dt=out.dt_j, m=out.m, v=out.v, a00=out.a00, p01=out.p01, d10=out.d10, f=out.f,
            c=out.c, supply=out.supply, mean_col=out.mean_col, mean_del=out.mean_del,
            trips_picked=out.trips_picked, trips_delivered=out.trips_delivered,
            p01_edge=out.p01_edge, d10_edge=out.d10_edge, gridlocked=out.gridlocked,
        )
        return row

    def _snapshot(self, t: float, before: State, after: State, frac: float) -> dict:
        names = ["k01", "k10", "K01", "K10"]
        if isinstance(before, PooledGridState):
            names += ["h0c", "hc0"]
        snap = {"t": np.full(len(self.x), t), "x": self.x.copy()}
        for name in names:
            a, b = getattr(before, name), getattr(after, name)
            snap[name] = a + frac * (b - a)
        return snap

    def _drained(self, s: State) -> bool:
        tol = 1e-6
        return s.w <= tol and s.n01 + s.n10 <= tol

    def drain(self, s: State) -> State:
        """Keep stepping with zero demand past the horizon until nothing is left to serve."""
        limit = self.scenario.horizon_h * max(self.settings.drain_factor, 1.0)
        while not (s.gridlocked or self._drained(s) or s.t >= limit):
            s, _ = self.step(s)
        return s

    def advance(self, s: State, until: float, trace: Optional[List[dict]] = None) -> State:
        """Step until the clock reaches `until`; trace rows are appended when a list is given."""
        while s.t < until - 1e-12:
            new, out = self.step(s)
            if trace is not None:
                trace.append(self._trace_row(s, out))
            s = new
        return s

    def run(self, state: Optional[State] = None) -> RunRecord:
        sc = self.scenario
        stride = self.options.stride or self.settings.snapshot_stride
        snap_every = stride * sc.dt_h
        limit = sc.horizon_h * max(self.settings.drain_factor, 1.0)

        s = state or self.initial_state()
        trace: List[dict] = []
        snaps: List[dict] = []
        n_snap = int(math.ceil(s.t / snap_every - 1e-9))
        while True:
            if s.t >= sc.horizon_h - 1e-12:
                if not self.options.drain or s.gridlocked or self._drained(s) or s.t >= limit:
                    break
            new, out = self.step(s)
            trace.append(self._trace_row(s, out))
            if self.options.snapshots:
                while n_snap * snap_every < new.t - 1e-12:
                    tau = n_snap * snap_every
                    snaps.append(self._snapshot(tau, s, new, (tau - s.t) / (new.t - s.t)))
                    n_snap += 1
            s = new
        trace.append(self._trace_row(s, None))

        trace_df = pd.DataFrame(trace)
        t_grid = self._base_grid(s.t)
        snaps = [d for d in snaps if d["t"][0] <= t_grid[-1] + 1e-12]
        if self.options.snapshots and n_snap * snap_every <= t_grid[-1] + 1e-12:
            snaps.append(self._snapshot(n_snap * snap_every, s, s, 1.0))
        series = self._series(trace_df, t_grid)
        snapshots = pd.DataFrame({k: np.concatenate([d[k] for d in snaps]) for k in snaps[0]}) if snaps else pd.DataFrame()
        summary = self._summary(s, trace_df, series)
        return RunRecord(
            scenario=sc,
            trace=trace_df,
            series=series,
            snapshots=snapshots,
            summary=summary,
            pooled=self.pooled,
            final_state=s,
        )

    def _base_grid(self, t_final: float) -> np.ndarray:
        sc = self.scenario
        end = sc.horizon_h if not self.options.drain else t_final
        end = min(end, t_final)
        n = int(math.floor(end / sc.dt_h + 1e-9))
        return np.arange(n + 1) * sc.dt_h

    def _series(self, trace: pd.DataFrame, t_grid: np.ndarray) -> pd.DataFrame:
        t = trace["t"].to_numpy()
        out = {"t": t_grid}
        for name in STATE_COLUMNS:
            out[name] = np.interp(t_grid, t, trace[name].to_numpy())
        # Rates belong to the step that started at or before each base time.
        idx = np.clip(np.searchsorted(t, t_grid, side="right") - 1, 0, len(t) - 1)
        for name in RATE_COLUMNS:
            out[name] = trace[name].to_numpy()[idx]
        return pd.DataFrame(out)

    def _summary(self, s: State, trace: pd.DataFrame, series: pd.DataFrame) -> RunSummary:
        Z = s.pooled_cost_accum if self.pooled else s.cost_accum
        requested = total_demand(self.scenario.demand, self.scenario.horizon_h)
        return RunSummary(
            gridlock_time_h=self._gridlock_time,
            Z=Z,
            Zbar_h=Z / requested if requested > 0 else None,
            backlog=float(trapezoid(trace["w"].to_numpy(), trace["t"].to_numpy())),
            t_star_h=self.control.t_star,
            a_bar=self.control.a_bar,
            max_rho=float(series["rho"].max()),
            rho_k=self.control.rho_k,
            t_end_h=s.t,
            drained=self._drained(s),
            pooled=self.pooled,
        )


def step(s: State, scenario: Scenario, policy: Optional[ControlPolicy] = None, pooling=None,
         options: Optional[RunOptions] = None) -> Tuple[State, StepOutcome]:
    """Single step with a throwaway simulator; run() is the efficient path for whole runs."""
    return Simulator(scenario, policy, pooling, options).step(s)


def run(scenario: Scenario, policy: Optional[ControlPolicy] = None, pooling=None,
        options: Optional[RunOptions] = None) -> RunRecord:
    """Run a scenario; pooling defaults to the policy the scenario names."""
    if pooling is None and scenario.pooled:
        pooling = pooling_policy_for(scenario)
    return Simulator(scenario, policy, pooling, options).run()



def pooled_step(s: PooledGridState, scenario: Scenario, pooling, policy: Optional[ControlPolicy] = None,
                options: Optional[RunOptions] = None) -> Tuple[PooledGridState, StepOutcome]:
    if not isinstance(s, PooledGridState):
        raise TypeError("pooled_step needs a PooledGridState")
    pooling = pooling or pooling_policy_for(scenario)
    if pooling is None:
        raise StateError("pooled_step needs a pooling policy")
    return Simulator(scenario, policy, pooling, options).step(s)
