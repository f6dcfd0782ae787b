from .speed_density import speed, critical_density, check_unimodal
from .demand import demand_at, total_demand
from .distances import desired_distance_ccdf, mean_collecting, mean_delivering
from .control import admission_rate, policy_for
from .pooling import pooled_sources, saturated_c, total_cost
from .dynamics import Simulator, RunOptions, boundary_fluxes, advect_step, step, pooled_step, run
from .metrics import closed_form_counts, closed_form_series, waiting_accounting, cumulative_curves, check_ledgers
from .dp import dp_optimize
from .optimality import optimality_probe

__all__ = [
    "speed", "critical_density", "check_unimodal",
    "demand_at", "total_demand",
    "desired_distance_ccdf", "mean_collecting", "mean_delivering",
    "admission_rate", "policy_for",
    "pooled_sources", "saturated_c", "total_cost",
    "Simulator", "RunOptions", "boundary_fluxes", "advect_step", "step", "pooled_step", "run",
    "closed_form_counts", "closed_form_series", "waiting_accounting", "cumulative_curves", "check_ledgers",
    "dp_optimize",
    "optimality_probe",
]
