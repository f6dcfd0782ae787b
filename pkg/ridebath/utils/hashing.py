import hashlib

from ..schemas.scenario import Scenario
from .scenario_file import scenario_to_keys


def canonical_text(scenario: Scenario) -> str:
    keys = scenario_to_keys(scenario)
    keys["n_floor"] = repr(float(scenario.n_floor))
    keys["support_tol"] = repr(float(scenario.support_tol))
    return "".join(f"{key} = {keys[key]}\n" for key in sorted(keys))


def config_hash(scenario: Scenario) -> str:
    """sha256 of the resolved scenario in canonical key = value form."""
    return hashlib.sha256(canonical_text(scenario).encode("utf-8")).hexdigest()
