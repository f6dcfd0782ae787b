from ..errors import ScenarioError
from ..models.kinds import CommandName, PoolingMode
from ..schemas.request import RunRequest
from ..services.control import policy_for
from ..services.dynamics import run
from ..utils.export import write_manifest, write_run
from .base import Command, load, run_options


def simulate(req: RunRequest) -> int:
    scenario, digest = load(req)
    if scenario.pooling.mode is PoolingMode.dp:
        raise ScenarioError("the dp pooling mode is optimized by the pool command", key="pooling.mode")
    policy = policy_for(scenario, recompute_cap=req.recompute_cap)
    record = run(scenario, policy, options=run_options(req))
    directory = req.output.directory
    files = write_run(record, directory, req.output.format, digest)
    write_manifest(directory, req.command.value, digest, files)
    return 0


command = Command(
    name=CommandName.simulate,
    help="run one scenario over [0, T] and export series, snapshots and summary",
    handler=simulate,
)
