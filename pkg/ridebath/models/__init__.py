from .kinds import (
    SdrKind, DemandKind, DistanceForm, SupplyPolicy, ControlMode, PoolingMode, Stage,
    CommandName, OutputFormat,
)
from .state import GridState, PooledGridState, StepOutcome, Transfers, Observation
from .policy import ControlPolicy
from .record import RunRecord, RunSummary

__all__ = [
    "SdrKind", "DemandKind", "DistanceForm", "SupplyPolicy", "ControlMode", "PoolingMode", "Stage",
    "CommandName", "OutputFormat",
    "GridState", "PooledGridState", "StepOutcome", "Transfers", "Observation",
    "ControlPolicy",
    "RunRecord", "RunSummary",
]
