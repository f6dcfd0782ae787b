from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class RunSummaryResponse(BaseModel):
    gridlock_time_min: Optional[float] = None
    t_star_min: Optional[float] = None
    a_bar_per_h: Optional[float] = None
    Z_pax_h: float
    zbar_min_per_trip: Optional[float] = None
    backlog_pax_h: float = 0.0
    max_rho: float
    config_hash: str


class PoolingSummaryResponse(RunSummaryResponse):
    c_schedule: List[int] = Field(default_factory=list)
    c_source: Optional[str] = None
    candidate_Z_pax_h: Dict[str, Optional[float]] = Field(default_factory=dict)


class AlternativeResponse(BaseModel):
    index: int
    fractions: List[float]
    Z_pax_h: Optional[float] = None
    excluded: Optional[str] = None


class OptimalityReportResponse(BaseModel):
    verdict: str                         # PASS, FAIL or ADVISORY-FAIL
    Z_db_pax_h: float
    n_alternatives: int
    n_excluded: int
    worst_margin: Optional[float] = None
    seed: int
    blocks: int
    notes: List[str] = Field(default_factory=list)
    alternatives: List[AlternativeResponse] = Field(default_factory=list)
    config_hash: str


class ConvergenceResponse(BaseModel):
    dx_km: float
    dx_half_km: float
    cumD_coarse: float
    cumD_fine: float
    relative_change: float
    passed: bool
    config_hash: str


class ReplicationItem(BaseModel):
    item: str
    target: float
    measured: Optional[float] = None
    unit: str
    status: str                          # pass or deviation
    note: Optional[str] = None


class ReplicationResponse(BaseModel):
    demand_scale: float
    scan: Dict[str, Optional[float]]     # scale -> uncontrolled gridlock time, min
    calibration: Optional[str] = None    # set when no scale factor gridlocks
    tolerance: float
    items: List[ReplicationItem]
    config_hash: str


class SweepPointResponse(BaseModel):
    directory: str
    overrides: Dict[str, str]
    config_hash: Optional[str] = None
    exit_code: int
    error: Optional[str] = None


class SweepIndexResponse(BaseModel):
    command: str
    points: List[SweepPointResponse]


class ManifestResponse(BaseModel):
    command: str
    config_hash: str
    files: List[str]
