"""Derived observables and bookkeeping checks over a finished run."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from ..config import get_settings
from ..errors import ConsistencyError, DomainError
from ..models.record import RunRecord

logger = logging.getLogger(__name__)


def _cohort_ccdf(distance: np.ndarray, mean: np.ndarray, limit: float) -> np.ndarray:
    """Uniform[0, 2B] CCDF per cohort; zero at and beyond the grid edge."""
    safe = np.where(mean > 0, mean, 1.0)
    phi = np.clip(1.0 - distance / (2.0 * safe), 0.0, 1.0)
    return np.where(distance < limit - 1e-9, phi, 0.0)


def closed_form_series(record: RunRecord) -> pd.DataFrame:
    """Active-vehicle counts rebuilt from the admission history alone, at every trace row.

    n01(t) is the integral over s < t of a00(s) * CCDF_s(z(t) - z(s)), taken by
    trapezoidal quadrature on the recorded step edges; a00 is held over each
    step, so a step contributes both of its edges at the same rate. n10
    integrates the pick-up rate p01 against the delivering sources the same way.
    """
    trace = record.trace
    limit = record.scenario.max_distance_km
    t = trace["t"].to_numpy()
    z = trace["z"].to_numpy()
    # both edges of every step, step j spanning [t_j, t_j+1]
    s_edges = np.column_stack([t[:-1], t[1:]]).ravel()
    z_edges = np.column_stack([z[:-1], z[1:]]).ravel()
    held = lambda column: np.repeat(trace[column].to_numpy()[:-1], 2)  # noqa: E731
    a00, p01 = held("a00"), held("p01")
    mean_col, mean_del = held("mean_col"), held("mean_del")

    n01 = np.zeros(len(t))
    n10 = np.zeros(len(t))
    for n in range(1, len(t)):
        k = 2 * n
        travelled = z[n] - z_edges[:k]
        n01[n] = trapezoid(a00[:k] * _cohort_ccdf(travelled, mean_col[:k], limit), s_edges[:k])
        n10[n] = trapezoid(p01[:k] * _cohort_ccdf(travelled, mean_del[:k], limit), s_edges[:k])
    return pd.DataFrame({"t": t, "n01": n01, "n10": n10})


def closed_form_counts(record: RunRecord, t: float) -> Tuple[float, float]:
    times = record.trace["t"].to_numpy()
    if t < 0 or t > times[-1] + 1e-12:
        raise DomainError(f"t={t} h outside the recorded horizon [0, {times[-1]:.6f}] h")
    closed = closed_form_series(record)
    return (
        float(np.interp(t, times, closed["n01"].to_numpy())),
        float(np.interp(t, times, closed["n10"].to_numpy())),
    )


@dataclass(frozen=True)
class WaitingAccount:
    w_series: pd.DataFrame
    total_wait: float         # pax*h before assignment
    figure3_curves: pd.DataFrame


def waiting_accounting(record: RunRecord, rtol: float = 1e-9) -> WaitingAccount:
    trace = record.trace
    rederived = trace["cumF"].to_numpy() - trace["cumA"].to_numpy()
    stored = trace["w"].to_numpy()
    scale = max(1.0, float(trace["cumF"].abs().max()))
    gap = float(np.max(np.abs(rederived - stored))) if len(stored) else 0.0
    if gap > rtol * scale:
        raise ConsistencyError(f"backlog differs from F - A by {gap:.3e} (scale {scale:.3e})")
    total_wait = float(trapezoid(stored, trace["t"].to_numpy()))
    curves = record.series[["t", "cumF", "cumA", "cumD"]].rename(columns={"cumF": "F", "cumA": "A", "cumD": "D"})
    return WaitingAccount(
        w_series=pd.DataFrame({"t": trace["t"], "w": stored, "F_minus_A": rederived}),
        total_wait=total_wait,
        figure3_curves=curves,
    )


def cumulative_curves(record: RunRecord) -> Tuple[pd.DataFrame, dict]:
    """F, A, P, D on the base grid plus the areas between them."""
    curves = record.series[["t", "cumF", "cumA", "cumP", "cumD"]].rename(
        columns={"cumF": "F", "cumA": "A", "cumP": "P", "cumD": "D"}
    )
    trace = record.trace
    t = trace["t"].to_numpy()
    area = lambda upper, lower: float(trapezoid((trace[upper] - trace[lower]).to_numpy(), t))  # noqa: E731
    areas = {
        "waiting_pax_h": area("cumF", "cumA"),
        "collecting_pax_h": area("cumA", "cumP"),
        "in_vehicle_pax_h": area("cumP", "cumD"),
    }
    return curves, areas


def check_ledgers(record: RunRecord, rtol: float = 1e-6) -> dict:
    """Per-step mass, vehicle and trip bookkeeping. Raises ConsistencyError on the first break."""
    trace = record.trace
    rows = trace.iloc[:-1]
    nxt = trace.iloc[1:]
    dt = rows["dt"].to_numpy()

    def compare(name, lhs, rhs, scale):
        err = np.abs(lhs - rhs)
        bad = np.nonzero(err > rtol * np.maximum(scale, 1.0))[0]
        if len(bad):
            i = int(bad[0])
            raise ConsistencyError(
                f"{name} ledger broken at t={rows['t'].iloc[i]:.6f} h: {lhs[i]:.9g} vs {rhs[i]:.9g}"
            )
        return float(err.max()) if len(err) else 0.0

    n01, n10, N = rows["n01"].to_numpy(), rows["n10"].to_numpy(), rows["N"].to_numpy()
    a00, p01, d10 = rows["a00"].to_numpy(), rows["p01"].to_numpy(), rows["d10"].to_numpy()
    report = {
        "collecting": compare("collecting", nxt["n01"].to_numpy() - n01, (a00 - p01) * dt, n01),
        "delivering": compare("delivering", nxt["n10"].to_numpy() - n10, (p01 - d10) * dt, n10),
        "vehicles": compare("vehicle", nxt["N"].to_numpy() - N, rows["supply"].to_numpy() * dt, N),
    }
    F, A = trace["cumF"].to_numpy(), trace["cumA"].to_numpy()
    gap = float(np.max(np.abs(F - A - trace["w"].to_numpy()))) if len(F) else 0.0
    if gap > 1e-9 * max(1.0, float(F.max())):
        raise ConsistencyError(f"trip ledger F - A - w = {gap:.3e}")
    report["trips"] = gap

    state = record.final_state
    if state is not None:
        dx = record.scenario.dx_km
        tol = get_settings().tol_count
        for tail, density in (("K01", "k01"), ("K10", "k10")):
            gap = abs(float(getattr(state, tail)[0]) - dx * float(getattr(state, density).sum()))
            if gap > tol:
                raise ConsistencyError(f"{tail}[0] differs from the integrated {density} by {gap:.3e} vehicles")
    return report
