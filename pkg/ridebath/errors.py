"""Engine exceptions. Each carries the process exit code the CLI returns."""
from typing import Optional


class RideBathError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ScenarioError(RideBathError):
    """Invalid scenario file, unknown key, or violated invariant."""
    exit_code = 2

    def __init__(
        self,
        detail: str,
        key: Optional[str] = None,
        path: Optional[str] = None,
        line: Optional[int] = None,
    ):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        prefix = f"{key}: " if key else ""
        super().__init__(f"{where}{prefix}{detail}")
        self.key = key
        self.path = path
        self.line = line


class ModelError(RideBathError):
    """Speed-density relation is not a usable MFD."""
    exit_code = 2


class DomainError(RideBathError):
    """Argument outside the operation's domain."""
    exit_code = 2


class StateError(RideBathError):
    """System state cannot support the requested evaluation."""
    exit_code = 3


class NumericFailure(RideBathError):
    exit_code = 3


class ConsistencyError(RideBathError):
    """Ledger identity broken beyond tolerance. Always a bug."""
    exit_code = 3
