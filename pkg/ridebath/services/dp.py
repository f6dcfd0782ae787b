"""Pooling-size optimization by Monte Carlo rollouts and backward recursion.

The decision epochs split [0, T] into equal blocks; a policy is one size per
block. Rollouts under sampled size sequences give (state, stage cost, next
state) samples on the reduced state S = (n00, n0c, nc0). A binned value
table is fitted backwards from V = 0 after the last block, then the policy
is recovered forwards by branching the simulator on every size. Every cost
that leaves this module comes from a full simulation.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from ..config import get_settings
from ..errors import NumericFailure, ScenarioError
from ..models.policy import ControlPolicy
from ..models.record import RunRecord
from ..schemas.scenario import Scenario
from .dynamics import RunOptions, Simulator
from .pooling import ScheduledSize

logger = logging.getLogger(__name__)

Sizes = Tuple[int, ...]


def stage_edges(scenario: Scenario, stages: Optional[int] = None) -> Tuple[float, ...]:
    J = stages or scenario.dp.stages
    return tuple(float(e) for e in np.linspace(0.0, scenario.horizon_h, J + 1))


def _simulator(scenario: Scenario, edges, sizes: Sizes, control: Optional[ControlPolicy] = None) -> Simulator:
    options = RunOptions(drain=True, snapshots=False)
    return Simulator(scenario, control, ScheduledSize(tuple(edges), tuple(sizes)), options)


def evaluate_sizes(scenario: Scenario, edges, sizes: Sizes) -> RunRecord:
    """Full drain-mode simulation of a blockwise size schedule."""
    return _simulator(scenario, edges, sizes).run()


@dataclass
class Rollout:
    sizes: Sizes
    states: np.ndarray      # (J + 1, 3): S at every stage boundary
    costs: np.ndarray       # (J,): stage costs, the last one including the drain tail
    total: float
    feasible: bool = True


def rollout(scenario: Scenario, edges, sizes: Sizes) -> Rollout:
    sim = _simulator(scenario, edges, sizes)
    s = sim.initial_state()
    J = len(sizes)
    states = np.zeros((J + 1, 3))
    costs = np.zeros(J)
    try:
        for j in range(J):
            states[j] = (s.n00, s.n01, s.n10)
            before = s.pooled_cost_accum
            s = sim.advance(s, edges[j + 1])
            if j == J - 1:
                s = sim.drain(s)
            costs[j] = s.pooled_cost_accum - before
    except NumericFailure as exc:
        logger.info("rollout %s dropped: %s", sizes, exc)
        return Rollout(sizes, states, costs, float("inf"), feasible=False)
    states[J] = (s.n00, s.n01, s.n10)
    return Rollout(sizes, states, costs, float(s.pooled_cost_accum), feasible=not s.gridlocked)


@dataclass
class ValueTable:
    """Q(S, c) per stage on uniform bins over the observed state range."""
    bins: int
    lo: np.ndarray = None    # (J + 1, 3)
    hi: np.ndarray = None
    q: List[Dict[Tuple[Tuple[int, ...], int], float]] = field(default_factory=list)
    v: List[Dict[Tuple[int, ...], float]] = field(default_factory=list)

    def cell(self, j: int, state) -> Tuple[int, ...]:
        lo, hi = self.lo[j], self.hi[j]
        span = np.where(hi > lo, hi - lo, 1.0)
        idx = np.floor((np.asarray(state) - lo) / span * self.bins).astype(int)
        return tuple(int(i) for i in np.clip(idx, 0, self.bins - 1))

    @staticmethod
    def _nearest(table: dict, key):
        if not table:
            return None
        return min(table, key=lambda k: (sum(abs(a - b) for a, b in zip(k, key)), k))

    def value(self, j: int, state) -> float:
        if j >= len(self.v):
            return 0.0
        key = self.cell(j, state)
        table = self.v[j]
        if key not in table:
            near = self._nearest(table, key)
            if near is None:
                return 0.0
            logger.info("stage %d: empty value bin %s, using %s", j, key, near)
            key = near
        return table[key]


def fit_value_table(rollouts: Sequence[Rollout], bins: int) -> ValueTable:
    usable = [r for r in rollouts if r.feasible]
    if not usable:
        raise NumericFailure("every rollout gridlocked or failed; no value table can be fitted")
    J = len(usable[0].sizes)
    states = np.stack([r.states for r in usable])          # (R, J + 1, 3)
    table = ValueTable(bins=bins, lo=states.min(axis=0), hi=states.max(axis=0))
    table.q = [dict() for _ in range(J)]
    table.v = [dict() for _ in range(J)]

    for j in range(J - 1, -1, -1):
        samples: Dict[Tuple[Tuple[int, ...], int], List[float]] = {}
        for r in usable:
            target = r.costs[j] + table.value(j + 1, r.states[j + 1])
            samples.setdefault((table.cell(j, r.states[j]), r.sizes[j]), []).append(target)
        table.q[j] = {k: float(np.mean(v)) for k, v in samples.items()}
        for (cell, _), q in table.q[j].items():
            table.v[j][cell] = min(q, table.v[j].get(cell, np.inf))
    return table


def sample_sequences(c_max: int, J: int, n_rollouts: int, seed: int) -> List[Sizes]:
    """All sequences when they fit in the budget, otherwise seeded uniform draws."""
    if c_max ** J <= n_rollouts:
        return list(itertools.product(range(1, c_max + 1), repeat=J))
    rng = np.random.default_rng(seed)
    draws = rng.integers(1, c_max + 1, size=(n_rollouts, J))
    return [tuple(int(c) for c in row) for row in draws]


def recover_policy(scenario: Scenario, edges, table: ValueTable, c_max: int) -> Sizes:
    """Forward pass: at each epoch branch on every size, keep argmin of stage cost + V(next)."""
    J = len(edges) - 1
    chosen: List[int] = []
    sim = _simulator(scenario, edges, (1,) * J)
    s = sim.initial_state()
    for j in range(J):
        best, best_c, best_state, best_sim = np.inf, None, None, None
        for c in range(1, c_max + 1):
            sizes = tuple(chosen) + (c,) * (J - j)
            branch = sim.fork(pooling=ScheduledSize(tuple(edges), sizes))
            try:
                nxt = branch.advance(s, edges[j + 1])
                if j == J - 1:
                    nxt = branch.drain(nxt)
            except NumericFailure:
                continue
            if nxt.gridlocked:
                continue
            score = (nxt.pooled_cost_accum - s.pooled_cost_accum) + table.value(j + 1, (nxt.n00, nxt.n01, nxt.n10))
            if score < best:  # strict: ties keep the smaller size
                best, best_c, best_state, best_sim = score, c, nxt, branch
        if best_c is None:
            logger.warning("stage %d: every size gridlocks, keeping c=1", j)
            best_c = 1
            best_sim = sim.fork(pooling=ScheduledSize(tuple(edges), tuple(chosen) + (1,) * (J - j)))
            best_state = best_sim.advance(s, edges[j + 1])
        chosen.append(best_c)
        sim, s = best_sim, best_state
    return tuple(chosen)


@dataclass
class DpResult:
    edges: Tuple[float, ...]
    sizes: Sizes
    Z: float
    Zbar: Optional[float]
    record: RunRecord
    source: str                           # which candidate won: recovered, rollout or constant
    candidates: Dict[str, float] = field(default_factory=dict)
    n_rollouts: int = 0


def dp_optimize(
    scenario: Scenario,
    bins: Optional[int] = None,
    n_rollouts: Optional[int] = None,
    seed: Optional[int] = None,
    stages: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> DpResult:
    settings = get_settings()
    bins = bins or scenario.dp.bins
    n_rollouts = n_rollouts or scenario.dp.rollouts
    seed = scenario.dp.seed if seed is None else seed
    n_jobs = n_jobs or settings.n_jobs
    c_max = scenario.pooling.c_max
    if bins < 2:
        raise ScenarioError("value table needs at least 2 bins per dimension", key="dp.bins")
    edges = stage_edges(scenario, stages)
    J = len(edges) - 1

    sequences = sample_sequences(c_max, J, n_rollouts, seed)
    logger.info("dp: %d stages, c_max=%d, %d rollouts, %d bins", J, c_max, len(sequences), bins)
    rollouts = Parallel(n_jobs=n_jobs)(
        delayed(rollout)(scenario, edges, seq)
        for seq in tqdm(sequences, desc="rollouts", unit="run", disable=not settings.progress)
    )
    table = fit_value_table(rollouts, bins)
    recovered = recover_policy(scenario, edges, table, c_max)

    # Final answer: best full simulation among recovered, best sampled and constant schedules.
    candidates: Dict[str, Sizes] = {"recovered": recovered}
    feasible = [r for r in rollouts if r.feasible]
    if feasible:
        candidates["rollout"] = min(feasible, key=lambda r: (r.total, r.sizes)).sizes
    for c in range(1, c_max + 1):
        candidates[f"constant_{c}"] = (c,) * J

    records = {name: evaluate_sizes(scenario, edges, sizes) for name, sizes in candidates.items()}
    costs = {name: rec.summary.Z if not rec.summary.gridlocked else float("inf") for name, rec in records.items()}
    winner = min(costs, key=lambda name: (costs[name], candidates[name]))
    record = records[winner]
    logger.info("dp: %s schedule %s wins with Z=%.6g pax*h", winner, candidates[winner], record.summary.Z)
    return DpResult(
        edges=edges,
        sizes=candidates[winner],
        Z=record.summary.Z,
        Zbar=record.summary.Zbar_h,
        record=record,
        source=winner,
        candidates=costs,
        n_rollouts=len(sequences),
    )
