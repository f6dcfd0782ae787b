from .scenario_file import parse_scenario, scenario_to_keys
from .hashing import config_hash
from .export import write_run, write_manifest

__all__ = ["parse_scenario", "scenario_to_keys", "config_hash", "write_run", "write_manifest"]
