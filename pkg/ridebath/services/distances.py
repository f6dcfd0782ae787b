"""Desired-distance distributions of collecting and delivering vehicles.

Desired distances are Uniform[0, 2B], so the CCDF is max(0, 1 - x/2B). Mean
distances follow the Manhattan-metric forms B01 = ell*sqrt(A/n00) and
B10 = ell'*sqrt(A), stretched by c and sqrt(c) for pooled tours.
"""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, StateError
from ..models.kinds import Stage
from ..schemas.scenario import DistanceDistributionModel


def mean_collecting(m: DistanceDistributionModel, n00: float, c: float = 1.0, n_floor: float = 1.0) -> float:
    return c * m.ell * math.sqrt(m.area / max(n00, n_floor))


def mean_delivering(m: DistanceDistributionModel, c: float = 1.0) -> float:
    return m.ell_prime * math.sqrt(m.area * c)


@dataclass(frozen=True)
class UniformSource:
    """Source distribution of one admission cohort, mean B km."""
    mean: float

    def __post_init__(self):
        if not self.mean > 0:
            raise StateError(f"mean desired distance must be positive, got {self.mean}")

    @property
    def upper(self) -> float:
        return 2.0 * self.mean

    def ccdf(self, x):
        return np.clip(1.0 - np.asarray(x, dtype=float) / self.upper, 0.0, 1.0)

    def injection_ccdf(self, x: np.ndarray) -> np.ndarray:
        """CCDF at step end of a cohort admitted evenly over one exact-shift step.

        Such a cohort has covered half a cell on average, so node x_i carries
        Phi(x_i + dx/2). The boundary node (x = X) holds zero.
        """
        dx = x[1] - x[0]
        phi = self.ccdf(x + 0.5 * dx)
        phi[-1] = 0.0
        return phi

    def cell_weights(self, x: np.ndarray) -> np.ndarray:
        """Share of the cohort in each cell [x_i, x_i+1) at step end; the tail beyond the grid lands in the last cell.

        The weights sum to Phi(dx/2). The remainder reached zero distance
        within the step.
        """
        phi = self.injection_ccdf(x)
        return phi - np.append(phi[1:], 0.0)

    def tail_beyond(self, X: float) -> float:
        return float(self.ccdf(X))


def source_for(m: DistanceDistributionModel, stage: Stage, n00: float, c: float = 1.0, n_floor: float = 1.0) -> UniformSource:
    if stage is Stage.collecting:
        return UniformSource(mean_collecting(m, n00, c, n_floor))
    return UniformSource(mean_delivering(m, c))


def desired_distance_ccdf(
    m: DistanceDistributionModel,
    n00: float,
    c: float,
    stage: Stage,
    x: float,
    n_floor: float = 1.0,
) -> float:
    if x < 0:
        raise DomainError(f"distance must be non-negative, got {x}")
    if stage is Stage.collecting and n00 < n_floor:
        raise StateError(f"idle fleet {n00} below the floor of {n_floor} vehicles")
    return float(source_for(m, stage, n00, c, n_floor).ccdf(x))
