from .scenario import (
    SpeedDensityRelation, DemandProfile, DistanceDistributionModel,
    ControlSpec, PoolingSpec, DpSpec, Scenario,
)
from .request import RunRequest, OutputSpec
from .report import (
    RunSummaryResponse, PoolingSummaryResponse, OptimalityReportResponse, AlternativeResponse,
    ConvergenceResponse, ReplicationResponse, ReplicationItem,
    SweepIndexResponse, SweepPointResponse, ManifestResponse,
)

__all__ = [
    "SpeedDensityRelation", "DemandProfile", "DistanceDistributionModel",
    "ControlSpec", "PoolingSpec", "DpSpec", "Scenario",
    "RunRequest", "OutputSpec",
    "RunSummaryResponse", "PoolingSummaryResponse", "OptimalityReportResponse", "AlternativeResponse",
    "ConvergenceResponse", "ReplicationResponse", "ReplicationItem",
    "SweepIndexResponse", "SweepPointResponse", "ManifestResponse",
]
