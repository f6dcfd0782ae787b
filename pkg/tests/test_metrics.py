import numpy as np
import pytest

from ridebath.errors import DomainError
from ridebath.services.control import policy_for
from ridebath.services.dynamics import RunOptions, run
from ridebath.services.metrics import (
    check_ledgers, closed_form_counts, closed_form_series, cumulative_curves, waiting_accounting,
)
from ridebath.services.pooling import cost_integral


@pytest.fixture
def drained(controlled):
    return run(controlled, policy_for(controlled), options=RunOptions(drain=True, snapshots=False))


def test_closed_form_matches_the_grid(scenario_factory):
    loads = (
        {},
        {"control.mode": "none", "demand.scale": "100"},
        {"supply_policy": "fixed_fleet", "demand.scale": "40"},
    )
    for changes in loads:
        sc = scenario_factory(changes)
        record = run(sc, policy_for(sc), options=RunOptions(snapshots=False))
        assert not record.summary.gridlocked
        closed = closed_form_series(record)
        late = record.trace["t"] >= 0.05 * sc.horizon_h
        for column in ("n01", "n10"):
            solver = record.trace.loc[late, column].to_numpy()
            rebuilt = closed.loc[late, column].to_numpy()
            assert (np.abs(rebuilt - solver) <= 0.02 * np.maximum(solver, 1.0)).all()


def test_closed_form_before_any_admission(drained):
    assert closed_form_counts(drained, 0.0) == (0.0, 0.0)


def test_closed_form_outside_horizon(drained):
    with pytest.raises(DomainError):
        closed_form_counts(drained, drained.horizon + 1.0)
    with pytest.raises(DomainError):
        closed_form_counts(drained, -0.1)


def test_no_backlog_without_control(uncontrolled):
    record = run(uncontrolled, policy_for(uncontrolled), options=RunOptions(snapshots=False))
    account = waiting_accounting(record)
    assert account.total_wait == 0.0
    assert (account.w_series["w"] == 0.0).all()


def test_backlog_builds_and_clears(drained):
    account = waiting_accounting(drained)
    assert account.total_wait > 0
    assert account.w_series["w"].iloc[-1] <= 1e-6
    assert list(account.figure3_curves.columns) == ["t", "F", "A", "D"]


def test_cumulative_curves_are_ordered(drained):
    curves, areas = cumulative_curves(drained)
    scale = 1e-9 * max(1.0, curves["F"].max())
    for name in ("F", "A", "P", "D"):
        assert (np.diff(curves[name]) >= -scale).all()
    assert (curves["F"] >= curves["A"] - scale).all()
    assert (curves["A"] >= curves["P"] - scale).all()
    assert (curves["P"] >= curves["D"] - scale).all()
    assert all(value >= 0 for value in areas.values())


def test_areas_add_up_to_total_cost(drained):
    _, areas = cumulative_curves(drained)
    total = areas["waiting_pax_h"] + areas["collecting_pax_h"] + areas["in_vehicle_pax_h"]
    assert total == pytest.approx(drained.summary.Z, rel=1e-6)


def test_cost_recomputed_from_trace(drained):
    assert cost_integral(drained.trace, pooled=False) == pytest.approx(drained.summary.Z, rel=1e-9)


def test_ledger_report(drained):
    report = check_ledgers(drained)
    assert set(report) == {"collecting", "delivering", "vehicles", "trips"}
    scale = drained.trace["cumA"].iloc[-1]
    A_minus_D = drained.trace["cumA"] - drained.trace["cumD"]
    active = drained.trace["n01"] + drained.trace["n10"]
    assert (np.abs(A_minus_D - active) <= 1e-6 * scale).all()


def test_closed_form_is_independent_of_the_grid_recurrence(scenario_factory):
    # constant speed and demand: the integral has the steady value a * B / v
    sc = scenario_factory({
        "sdr.kind": "tabulated", "sdr.params": "rho_0:0, v_0:30, rho_1:1000, v_1:30",
        "demand.kind": "tabulated", "demand.params": "t_0:0, f_0:600, t_1:2, f_1:600",
        "demand.scale": "1", "control.mode": "none",
    })
    record = run(sc, policy_for(sc), options=RunOptions(snapshots=False))
    n01, n10 = closed_form_counts(record, 1.0)
    assert n01 == pytest.approx(600.0 * 0.63 * np.sqrt(0.1) / 30.0, rel=5e-3)
    assert n10 == pytest.approx(600.0 * 1.15 * np.sqrt(5.0) / 30.0, rel=5e-3)


def test_backlog_area_is_reported(drained):
    account = waiting_accounting(drained)
    assert drained.summary.backlog == pytest.approx(account.total_wait, rel=1e-12)
