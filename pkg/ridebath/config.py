from pydantic_settings import BaseSettings
from functools import lru_cache


class Settings(BaseSettings):
    # Numerical guards
    n_floor: float = 1.0          # vehicles, floor on n00 when evaluating B01
    tol_count: float = 1.0        # vehicles, tail count vs integrated density
    support_tol: float = 1e-3     # max CCDF mass allowed beyond the grid
    default_v_floor_kmh: float = 0.1

    # Horizon extension when draining backlog after T
    drain_factor: float = 4.0

    # Output
    snapshot_stride: int = 10     # base steps between distance snapshots
    output_format: str = "csv"

    # Pooling-size optimizer
    dp_bins: int = 16
    dp_rollouts: int = 512
    dp_stages: int = 12
    dp_seed: int = 0

    # Execution
    n_jobs: int = 1
    progress: bool = False

    # Replication report
    replication_tolerance: float = 0.15

    # App
    app_name: str = "ridebath"
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "RIDEBATH_"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    return Settings()
