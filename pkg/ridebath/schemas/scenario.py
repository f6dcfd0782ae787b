"""Validated, immutable problem instance."""
import math
from typing import Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from ..models.kinds import (
    ControlMode, DemandKind, DistanceForm, PoolingMode, SdrKind, SupplyPolicy,
)

Params = Tuple[Tuple[str, float], ...]

SDR_REQUIRED = {
    SdrKind.piecewise_min: ("v_free", "wave", "jam"),
    SdrKind.greenshields: ("v_free", "jam"),
}
DEMAND_REQUIRED = {
    DemandKind.trapezoid_ramp: ("slope", "cap", "end"),
}


def _tabulated_columns(params: Params, xname: str, yname: str) -> Tuple[list, list]:
    table = dict(params)
    n = 0
    while f"{xname}_{n}" in table:
        n += 1
    if n < 2:
        raise ValueError(f"tabulated form needs {xname}_0, {yname}_0, {xname}_1, {yname}_1 ...")
    xs, ys = [], []
    for i in range(n):
        if f"{yname}_{i}" not in table:
            raise ValueError(f"missing {yname}_{i}")
        xs.append(table[f"{xname}_{i}"])
        ys.append(table[f"{yname}_{i}"])
    extra = set(table) - {f"{xname}_{i}" for i in range(n)} - {f"{yname}_{i}" for i in range(n)}
    if extra:
        raise ValueError(f"unexpected parameters {sorted(extra)}")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError(f"{xname} breakpoints must be strictly increasing")
    return xs, ys


class SpeedDensityRelation(BaseModel):
    kind: SdrKind
    parameters: Params

    class Config:
        frozen = True

    def param(self, name: str, default: Optional[float] = None) -> float:
        value = dict(self.parameters).get(name, default)
        if value is None:
            raise KeyError(name)
        return value

    def table(self) -> Tuple[list, list]:
        return _tabulated_columns(self.parameters, "rho", "v")

    @property
    def free_flow_speed(self) -> float:
        if self.kind is SdrKind.tabulated:
            return self.table()[1][0]
        return self.param("v_free")

    @property
    def jam_density(self) -> float:
        """Density where speed reaches zero; inf for a tabulated form that never reaches zero."""
        if self.kind is SdrKind.tabulated:
            rhos, vs = self.table()
            for rho, v in zip(rhos, vs):
                if v == 0:
                    return rho
            return math.inf
        return self.param("jam")

    @model_validator(mode="after")
    def check_invariants(self):
        names = dict(self.parameters)
        if any(v < 0 for v in names.values()):
            raise ValueError("speed-density parameters must be non-negative")
        if self.kind is SdrKind.tabulated:
            rhos, vs = self.table()
            if rhos[0] != 0:
                raise ValueError("tabulated relation must start at rho_0 = 0")
            if any(b > a for a, b in zip(vs, vs[1:])):
                raise ValueError("tabulated speeds must be non-increasing")
            return self
        missing = [p for p in SDR_REQUIRED[self.kind] if p not in names]
        if missing:
            raise ValueError(f"missing parameters {missing}")
        allowed = set(SDR_REQUIRED[self.kind]) | ({"capacity"} if self.kind is SdrKind.piecewise_min else set())
        extra = set(names) - allowed
        if extra:
            raise ValueError(f"unexpected parameters {sorted(extra)}")
        if names["v_free"] <= 0 or names["jam"] <= 0:
            raise ValueError("v_free and jam must be positive")
        return self


class DemandProfile(BaseModel):
    kind: DemandKind
    parameters: Params
    scale: float = Field(default=1.0, ge=0)

    class Config:
        frozen = True

    def param(self, name: str) -> float:
        return dict(self.parameters)[name]

    def table(self) -> Tuple[list, list]:
        return _tabulated_columns(self.parameters, "t", "f")

    @property
    def support(self) -> Tuple[float, float]:
        if self.kind is DemandKind.tabulated:
            ts, _ = self.table()
            return ts[0], ts[-1]
        return 0.0, self.param("end")

    @model_validator(mode="after")
    def check_invariants(self):
        names = dict(self.parameters)
        if self.kind is DemandKind.tabulated:
            ts, fs = self.table()
            if ts[0] < 0 or any(f < 0 for f in fs):
                raise ValueError("tabulated demand needs t >= 0 and f >= 0")
            return self
        missing = [p for p in DEMAND_REQUIRED[self.kind] if p not in names]
        if missing:
            raise ValueError(f"missing parameters {missing}")
        extra = set(names) - set(DEMAND_REQUIRED[self.kind])
        if extra:
            raise ValueError(f"unexpected parameters {sorted(extra)}")
        if any(v < 0 for v in names.values()):
            raise ValueError("demand parameters must be non-negative")
        return self


class DistanceDistributionModel(BaseModel):
    ell: float = Field(gt=0)
    ell_prime: float = Field(gt=0)
    area: float = Field(gt=0)
    form: DistanceForm = DistanceForm.uniform_ccdf

    class Config:
        frozen = True


class ControlSpec(BaseModel):
    mode: ControlMode = ControlMode.none
    eps_rho: Optional[float] = Field(default=None, gt=0)

    class Config:
        frozen = True

    @field_validator("mode")
    @classmethod
    def reject_scheduled(cls, mode: ControlMode) -> ControlMode:
        if mode is ControlMode.scheduled:
            raise ValueError("scheduled admission is internal to the optimality check")
        return mode


class PoolingSpec(BaseModel):
    mode: PoolingMode = PoolingMode.off
    c: int = Field(default=1, ge=1)
    c_max: int = Field(default=1, ge=1)

    class Config:
        frozen = True

    @property
    def largest_size(self) -> int:
        if self.mode is PoolingMode.off:
            return 1
        if self.mode is PoolingMode.fixed:
            return self.c
        return self.c_max


class DpSpec(BaseModel):
    bins: int = Field(default=16, ge=2)
    rollouts: int = Field(default=512, ge=1)
    seed: int = 0
    stages: int = Field(default=12, ge=1)

    class Config:
        frozen = True


class Scenario(BaseModel):
    lane_km: float = Field(gt=0)
    area_km2: float = Field(gt=0)
    horizon_h: float = Field(gt=0)
    max_distance_km: float = Field(gt=0)
    dx_km: float = Field(gt=0)
    dt_h: float = Field(gt=0)
    n00_init: float = Field(default=50.0, ge=0)
    supply_policy: SupplyPolicy = SupplyPolicy.balanced
    speed_density: SpeedDensityRelation
    demand: DemandProfile
    distances: DistanceDistributionModel
    control: ControlSpec = ControlSpec()
    pooling: PoolingSpec = PoolingSpec()
    dp: DpSpec = DpSpec()
    v_floor_kmh: float = Field(default=0.1, gt=0)
    release_dt_h: Optional[float] = Field(default=None, gt=0)
    n_floor: float = Field(default=1.0, gt=0)
    support_tol: float = Field(default=1e-3, gt=0)

    class Config:
        frozen = True

    @property
    def n_cells(self) -> int:
        return int(round(self.max_distance_km / self.dx_km))

    @property
    def release_dt(self) -> float:
        return self.release_dt_h if self.release_dt_h is not None else self.dt_h

    @property
    def eps_rho(self) -> float:
        return self.control.eps_rho if self.control.eps_rho is not None else 1.0 / self.lane_km

    @property
    def pooled(self) -> bool:
        return self.pooling.mode is not PoolingMode.off

    @model_validator(mode="after")
    def check_invariants(self):
        if abs(self.distances.area - self.area_km2) > 1e-12 * self.area_km2:
            raise ValueError("area_km2: distance model area differs from the network area")
        if self.n_cells < 2:
            raise ValueError("dx_km: grid needs at least two cells below max_distance_km")
        if abs(self.n_cells * self.dx_km - self.max_distance_km) > 1e-9 * self.max_distance_km:
            raise ValueError("dx_km: max_distance_km must be a whole number of cells")
        if self.pooling.c > self.pooling.c_max:
            raise ValueError("pooling.c: exceeds c_max")
        self._check_support()
        return self

    def _check_support(self):
        # Worst-case means: smallest idle pool the run can reach, largest pooling size.
        c = self.pooling.largest_size
        n00 = self.n00_init if self.supply_policy is SupplyPolicy.balanced else self.n_floor
        n00 = max(n00, self.n_floor)
        d = self.distances
        means = {
            "collecting": c * d.ell * math.sqrt(d.area / n00),
            "delivering": d.ell_prime * math.sqrt(d.area * c),
        }
        X = self.max_distance_km
        for stage, mean in means.items():
            tail = max(0.0, 1.0 - X / (2.0 * mean))
            if tail > self.support_tol:
                raise ValueError(
                    f"max_distance_km: {stage} distances reach {2 * mean:.4g} km "
                    f"beyond the grid ({X:g} km); increase max_distance_km"
                )
