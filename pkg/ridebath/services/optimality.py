"""Monte Carlo dominance check of density-based admission.

Alternatives admit a random fraction of the admissible rate f + w/dt in each
of a few equal blocks of the horizon and release everything after T. All
runs drain their backlog, so every control serves the same trips and total
costs compare directly.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from ..config import get_settings
from ..errors import NumericFailure
from ..models.kinds import ControlMode, SupplyPolicy
from ..schemas.scenario import Scenario
from .control import policy_for, scheduled_policy
from .dynamics import RunOptions, Simulator
from .pooling import policy_for as pooling_policy_for

logger = logging.getLogger(__name__)

RTOL = 1e-3


@dataclass
class Alternative:
    index: int
    fractions: List[float]
    Z: Optional[float] = None
    excluded: Optional[str] = None


@dataclass
class OptimalityReport:
    Z_db: float
    alternatives: List[Alternative] = field(default_factory=list)
    passed: bool = True
    advisory: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def evaluated(self) -> List[Alternative]:
        return [a for a in self.alternatives if a.excluded is None]

    @property
    def worst_margin(self) -> Optional[float]:
        """Smallest Z_alt / Z_db - 1 over evaluated alternatives."""
        if not self.evaluated or self.Z_db <= 0:
            return None
        return min(a.Z / self.Z_db - 1.0 for a in self.evaluated)


def _evaluate(scenario: Scenario, policy, index: int, fractions) -> Alternative:
    alt = Alternative(index=index, fractions=[float(u) for u in fractions])
    sim = Simulator(scenario, policy, pooling_policy_for(scenario) if scenario.pooled else None,
                    RunOptions(drain=True, snapshots=False))
    try:
        summary = sim.run().summary
    except NumericFailure as exc:
        alt.excluded = f"numeric failure: {exc.detail}"
        return alt
    if summary.gridlocked:
        alt.excluded = f"gridlock at t={summary.gridlock_time_h:.4f} h"
    elif not summary.drained:
        alt.excluded = "backlog not drained within the extended horizon"
    else:
        alt.Z = summary.Z
    return alt


def optimality_probe(
    scenario: Scenario,
    n_alternatives: int,
    seed: int = 0,
    blocks: int = 8,
    n_jobs: Optional[int] = None,
) -> OptimalityReport:
    settings = get_settings()
    db_scenario = scenario.model_copy(update={"control": _with_db_control(scenario)})
    base = policy_for(db_scenario)
    options = RunOptions(drain=True, snapshots=False)
    pooling = pooling_policy_for(db_scenario) if db_scenario.pooled else None
    db = Simulator(db_scenario, base, pooling, options).run().summary
    result = OptimalityReport(Z_db=db.Z)
    if db.gridlocked or not db.drained:
        result.notes.append("density-based run did not drain; comparison is not meaningful")
    if scenario.supply_policy is SupplyPolicy.fixed_fleet:
        result.advisory = True
        result.notes.append("fixed fleet: the cap is approximate, dominance is reported, not asserted")

    rng = np.random.default_rng(seed)
    edges = np.linspace(0.0, scenario.horizon_h, blocks + 1)
    draws = rng.uniform(0.0, 1.0, size=(n_alternatives, blocks))
    jobs = (
        delayed(_evaluate)(db_scenario, scheduled_policy(base, edges, row), i, row)
        for i, row in enumerate(tqdm(draws, desc="alternatives", unit="run", disable=not settings.progress))
    )
    alternatives = Parallel(n_jobs=n_jobs or settings.n_jobs)(jobs) if n_alternatives else []
    result.alternatives = sorted(alternatives, key=lambda a: a.index)

    for alt in result.alternatives:
        if alt.excluded:
            logger.info("alternative %d excluded: %s", alt.index, alt.excluded)
            result.notes.append(f"alternative {alt.index} excluded: {alt.excluded}")
        elif db.Z > alt.Z * (1.0 + RTOL):
            result.passed = False
            logger.warning("alternative %d beats density-based admission: %.6g < %.6g", alt.index, alt.Z, db.Z)
    logger.info(
        "optimality check: %s over %d alternatives (%d excluded)",
        "PASS" if result.passed else "FAIL", n_alternatives, n_alternatives - len(result.evaluated),
    )
    return result


def _with_db_control(scenario: Scenario):
    return scenario.control.model_copy(update={"mode": ControlMode.db})
