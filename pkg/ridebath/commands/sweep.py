import itertools
import logging

from joblib import Parallel, delayed

from ..config import get_settings
from ..errors import RideBathError, ScenarioError
from ..models.kinds import CommandName, PoolingMode
from ..schemas.report import SweepIndexResponse, SweepPointResponse
from ..schemas.request import RunRequest
from ..utils.export import write_document
from ..utils.hashing import config_hash
from ..utils.scenario_file import parse_scenario
from .base import Command
from .pool import pool
from .simulate import simulate

logger = logging.getLogger(__name__)


def _run_point(req: RunRequest, index: int, overrides: dict) -> SweepPointResponse:
    name = f"point_{index:03d}"
    point = req.model_copy(update={
        "overrides": list(req.overrides) + list(overrides.items()),
        "output": req.output.model_copy(update={"directory": req.output.directory / name}),
    })
    try:
        scenario = parse_scenario(point.scenario, point.overrides)
        handler = simulate if scenario.pooling.mode is PoolingMode.off else pool
        code = handler(point.model_copy(update={"command": CommandName(handler.__name__)}))
        return SweepPointResponse(directory=name, overrides=overrides, config_hash=config_hash(scenario), exit_code=code)
    except RideBathError as exc:
        logger.warning("sweep %s failed: %s", name, exc.detail)
        return SweepPointResponse(directory=name, overrides=overrides, exit_code=exc.exit_code, error=str(exc))


def sweep(req: RunRequest) -> int:
    if not req.grid:
        raise ScenarioError("sweep needs at least one --grid key=v1,v2,...")
    keys = [key for key, _ in req.grid]
    points = [dict(zip(keys, combo)) for combo in itertools.product(*(values for _, values in req.grid))]
    logger.info("sweep over %d points (%s)", len(points), ", ".join(keys))

    results = Parallel(n_jobs=get_settings().n_jobs)(
        delayed(_run_point)(req, i, overrides) for i, overrides in enumerate(points)
    )
    req.output.directory.mkdir(parents=True, exist_ok=True)
    write_document(SweepIndexResponse(command=req.command.value, points=results), req.output.directory, "sweep_index.json")
    return max((r.exit_code for r in results), default=0)


command = (
    Command(
        name=CommandName.sweep,
        help="run the scenario over a Cartesian grid of overrides, one directory per point",
        handler=sweep,
    )
    .argument("--grid", action="append", default=[], metavar="KEY=V1,V2,...")
)
