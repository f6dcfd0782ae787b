import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

from ..models.kinds import CommandName
from ..schemas.request import RunRequest
from ..schemas.scenario import Scenario
from ..services.dynamics import RunOptions
from ..services.speed_density import critical_density
from ..utils.hashing import config_hash
from ..utils.scenario_file import parse_scenario

logger = logging.getLogger(__name__)

Argument = Tuple[Tuple[str, ...], dict]


@dataclass
class Command:
    """One CLI verb: its extra arguments and the handler that writes its artifacts."""
    name: CommandName
    help: str
    handler: Callable[[RunRequest], int]
    arguments: List[Argument] = field(default_factory=list)

    def argument(self, *flags: str, **kwargs) -> "Command":
        self.arguments.append((flags, kwargs))
        return self


def load(req: RunRequest, extra_overrides=()) -> Tuple[Scenario, str]:
    scenario = parse_scenario(req.scenario, list(req.overrides) + list(extra_overrides))
    digest = config_hash(scenario)
    logger.info(
        "scenario %s loaded: hash %s, rho_k=%.6g veh/lane-km",
        req.scenario, digest[:12], critical_density(scenario.speed_density),
    )
    return scenario, digest


def run_options(req: RunRequest, drain: bool = False, snapshots: bool = True) -> RunOptions:
    return RunOptions(
        paper_fdm=req.paper_fdm,
        recompute_cap=req.recompute_cap,
        drain=drain,
        stride=req.output.stride,
        snapshots=snapshots,
    )
