"""Discretized bathtub state.

Field arrays are indexed by remaining distance x_i = i*dx, i = 0..I. k arrays
are densities (vehicles/km) of the cell [x_i, x_i+1); K arrays are tail counts
(vehicles with remaining distance >= x_i). Index I is the grid boundary and
always holds zero.
"""
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(kw_only=True)
class GridState:
    j: int = 0
    t: float = 0.0
    k01: np.ndarray
    k10: np.ndarray
    K01: np.ndarray
    K10: np.ndarray
    n00: float
    w: float = 0.0
    z: float = 0.0
    cumF: float = 0.0
    cumA: float = 0.0
    cumP: float = 0.0
    cumD: float = 0.0
    cost_accum: float = 0.0
    pooled_cost_accum: float = 0.0
    gridlocked: bool = False
    c_now: int = 1

    @classmethod
    def empty(cls, n_nodes: int, n00: float, **kwargs) -> "GridState":
        zeros = lambda: np.zeros(n_nodes)  # noqa: E731
        return cls(k01=zeros(), k10=zeros(), K01=zeros(), K10=zeros(), n00=n00, **kwargs)

    @property
    def n01(self) -> float:
        return float(self.K01[0])

    @property
    def n10(self) -> float:
        return float(self.K10[0])

    @property
    def N(self) -> float:
        return self.n00 + self.n01 + self.n10

    def rho(self, lane_km: float) -> float:
        return self.N / lane_km

    def evolve(self, **changes) -> "GridState":
        return replace(self, **changes)


@dataclass(kw_only=True)
class PooledGridState(GridState):
    """Grid state of a pooled run: k01/k10 count vehicles, h0c/hc0 count the trips they carry."""
    h0c: np.ndarray = field(default_factory=lambda: np.zeros(0))
    hc0: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def empty(cls, n_nodes: int, n00: float, **kwargs) -> "PooledGridState":
        return super().empty(n_nodes, n00, h0c=np.zeros(n_nodes), hc0=np.zeros(n_nodes), **kwargs)

    def trips_collecting(self, dx: float) -> float:
        return dx * float(self.h0c.sum())

    def trips_delivering(self, dx: float) -> float:
        return dx * float(self.hc0.sum())


@dataclass(frozen=True)
class StepOutcome:
    dt_j: float
    m: int
    v: float
    a00: float
    p01: float
    d10: float
    gridlocked: bool
    f: float = 0.0
    c: int = 1
    supply: float = 0.0      # s, vehicles/h
    mean_col: float = 0.0    # source mean of the cohort admitted this step, km
    mean_del: float = 0.0
    trips_picked: float = 0.0     # trips/h leaving the collecting state
    trips_delivered: float = 0.0  # trips/h
    p01_edge: float = 0.0    # k01(0) * v
    d10_edge: float = 0.0    # k10(0) * v


@dataclass(frozen=True)
class Transfers:
    """Counts that changed state during one step, in vehicles and in trips."""
    picked: float
    delivered: float
    trips_picked: float
    trips_delivered: float


@dataclass(frozen=True)
class Observation:
    """What the admission rule sees at the start of a step."""
    t: float
    rho: float
    f: float
    w: float
    d10: float
    v: float
    k10_at_0: float
