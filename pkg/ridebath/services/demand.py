import numpy as np
from scipy.integrate import trapezoid

from ..errors import DomainError
from ..models.kinds import DemandKind
from ..schemas.scenario import DemandProfile


def _profile(d: DemandProfile, t: np.ndarray) -> np.ndarray:
    lo, hi = d.support
    if d.kind is DemandKind.trapezoid_ramp:
        slope, cap, end = d.param("slope"), d.param("cap"), d.param("end")
        f = np.clip(np.minimum(slope * t, slope * (end - t)), 0.0, cap)
    else:
        ts, fs = d.table()
        f = np.interp(t, ts, fs)
    return np.where((t >= lo) & (t <= hi), d.scale * f, 0.0)


def demand_at(d: DemandProfile, t: float) -> float:
    """Trip requests per hour at time t (hours)."""
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    return float(_profile(d, np.array([t], dtype=float))[0])


def total_demand(d: DemandProfile, until: float, points: int = 20_001) -> float:
    """Trips requested over [0, until], by trapezoidal quadrature."""
    t = np.linspace(0.0, until, points)
    return float(trapezoid(_profile(d, t), t))
