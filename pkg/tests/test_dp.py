import itertools

import numpy as np
import pytest

from ridebath.errors import NumericFailure
from ridebath.services.dp import (
    Rollout, dp_optimize, evaluate_sizes, fit_value_table, recover_policy, rollout, sample_sequences,
    stage_edges,
)


def make_rollout(sizes, start, cost, feasible=True):
    states = np.array([start, [1.0, 1.0, 1.0]], dtype=float)
    return Rollout(sizes=sizes, states=states, costs=np.array([cost]), total=cost, feasible=feasible)


def test_stage_edges(controlled):
    edges = stage_edges(controlled, 4)
    assert edges == pytest.approx((0.0, 0.5, 1.0, 1.5, 2.0))


def test_small_policy_spaces_are_enumerated():
    assert sample_sequences(2, 3, 16, seed=0) == list(itertools.product((1, 2), repeat=3))


def test_sampled_sequences_are_seeded():
    first = sample_sequences(3, 6, 10, seed=4)
    assert first == sample_sequences(3, 6, 10, seed=4)
    assert len(first) == 10
    assert all(1 <= c <= 3 for seq in first for c in seq)


def test_backward_recursion_averages_and_minimizes():
    table = fit_value_table([
        make_rollout((1,), [0.0, 0.0, 0.0], 5.0),
        make_rollout((1,), [0.0, 0.0, 0.0], 7.0),
        make_rollout((2,), [0.0, 0.0, 0.0], 3.0),
    ], bins=4)
    assert table.q[0][((0, 0, 0), 1)] == pytest.approx(6.0)
    assert table.q[0][((0, 0, 0), 2)] == pytest.approx(3.0)
    assert table.value(0, (0.0, 0.0, 0.0)) == pytest.approx(3.0)
    assert table.value(1, (5.0, 5.0, 5.0)) == 0.0


def test_empty_bin_falls_back_to_nearest():
    table = fit_value_table([
        make_rollout((1,), [0.0, 0.0, 0.0], 5.0),
        make_rollout((1,), [10.0, 10.0, 10.0], 9.0),
    ], bins=4)
    assert table.value(0, (4.0, 4.0, 4.0)) == pytest.approx(5.0)


def test_no_feasible_rollout():
    with pytest.raises(NumericFailure):
        fit_value_table([make_rollout((1,), [0.0, 0.0, 0.0], 5.0, feasible=False)], bins=4)


@pytest.fixture
def dp_scenario(scenario_factory):
    return scenario_factory({
        "pooling.mode": "dp", "c_max": "2",
        "dp.stages": "3", "dp.rollouts": "16", "dp.bins": "4",
    })


def test_size_one_only_is_the_unpooled_schedule(scenario_factory):
    sc = scenario_factory({"pooling.mode": "dp", "c_max": "1", "dp.stages": "3", "dp.rollouts": "4"})
    result = dp_optimize(sc)
    assert result.sizes == (1, 1, 1)
    baseline = evaluate_sizes(sc, stage_edges(sc), (1, 1, 1))
    assert result.Z == pytest.approx(baseline.summary.Z)


def test_matches_brute_force_and_dominates_constants(dp_scenario):
    result = dp_optimize(dp_scenario)
    edges = stage_edges(dp_scenario)
    costs = {}
    for sizes in itertools.product((1, 2), repeat=3):
        record = evaluate_sizes(dp_scenario, edges, sizes)
        assert not record.summary.gridlocked
        costs[sizes] = record.summary.Z
    assert result.Z == pytest.approx(min(costs.values()), rel=1e-12)
    assert result.Z <= costs[(1, 1, 1)]
    assert result.Z <= costs[(2, 2, 2)]
    assert result.record.summary.drained
    assert result.n_rollouts == 8


def test_forward_recovery_with_exhaustive_rollouts_is_exact(dp_scenario):
    edges = stage_edges(dp_scenario)
    sequences = sample_sequences(2, 3, 16, seed=0)
    rollouts = [rollout(dp_scenario, edges, sizes) for sizes in sequences]
    assert all(r.feasible for r in rollouts)
    # fine bins keep every distinct stage state in its own cell
    table = fit_value_table(rollouts, bins=1000)
    sizes = recover_policy(dp_scenario, edges, table, c_max=2)
    assert len(sizes) == 3
    assert set(sizes) <= {1, 2}
    totals = {r.sizes: r.total for r in rollouts}
    assert totals[sizes] == pytest.approx(min(totals.values()), rel=1e-9)
    assert table.value(0, rollouts[0].states[0]) == pytest.approx(min(totals.values()), rel=1e-9)
