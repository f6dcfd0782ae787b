"""Outputs of one simulation run.

`trace` has one row per dynamics step (state at the step start plus the
rates used during the step) and a closing row for the final state; it is the
exact record every ledger and cost check works from. `series` resamples the
trace onto the base grid t = n*dt, `snapshots` holds the distance fields
every `stride` base steps in long format.
"""
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class RunSummary:
    Z: float
    max_rho: float
    rho_k: float
    t_end_h: float
    drained: bool
    pooled: bool
    gridlock_time_h: Optional[float] = None
    Zbar_h: Optional[float] = None
    backlog: float = 0.0     # integral of w over the run, passenger-hours
    t_star_h: Optional[float] = None
    a_bar: Optional[float] = None

    @property
    def gridlocked(self) -> bool:
        return self.gridlock_time_h is not None


@dataclass
class RunRecord:
    scenario: Any
    trace: pd.DataFrame
    series: pd.DataFrame
    snapshots: pd.DataFrame
    summary: RunSummary
    pooled: bool = False
    final_state: Any = None

    @property
    def horizon(self) -> float:
        return float(self.trace["t"].iloc[-1])

    @property
    def steps(self) -> pd.DataFrame:
        """Trace rows of executed steps, without the closing row."""
        return self.trace.iloc[:-1]

    def c_series(self) -> pd.DataFrame:
        return self.series[["t", "c"]]

    def value_at(self, column: str, t: float) -> float:
        return float(np.interp(t, self.trace["t"].to_numpy(), self.trace[column].to_numpy()))
