"""Per-run admission control state. Each run owns its own copy."""
import bisect
from dataclasses import dataclass
from typing import Optional, Tuple

from .kinds import ControlMode


@dataclass
class ControlPolicy:
    mode: ControlMode
    rho_k: float
    eps_rho: float
    release_dt: float
    lane_km: float
    a_bar: Optional[float] = None
    t_star: Optional[float] = None
    recompute_cap: bool = False
    # Scheduled admission: fraction of the admissible rate per block.
    block_edges: Tuple[float, ...] = ()
    fractions: Tuple[float, ...] = ()

    @property
    def crossed(self) -> bool:
        return self.t_star is not None

    def fraction_at(self, t: float) -> float:
        if not self.fractions:
            return 1.0
        i = bisect.bisect_right(self.block_edges, t) - 1
        if i >= len(self.fractions):
            return 1.0
        return self.fractions[max(i, 0)]

