from ..models.kinds import CommandName
from ..schemas.report import ConvergenceResponse
from ..schemas.request import RunRequest
from ..services.control import policy_for
from ..services.dynamics import run
from ..utils.export import write_document, write_manifest
from .base import Command, load, run_options

MAX_CHANGE = 0.02


def terminal_deliveries(scenario, req: RunRequest) -> float:
    policy = policy_for(scenario, recompute_cap=req.recompute_cap)
    record = run(scenario, policy, options=run_options(req, snapshots=False))
    return record.value_at("cumD", scenario.horizon_h)


def convergence(req: RunRequest) -> int:
    scenario, digest = load(req)
    fine_scenario, _ = load(req, extra_overrides=[("dx_km", repr(scenario.dx_km / 2.0))])
    coarse = terminal_deliveries(scenario, req)
    fine = terminal_deliveries(fine_scenario, req)
    change = abs(fine - coarse) / max(abs(fine), 1e-12)
    report = ConvergenceResponse(
        dx_km=scenario.dx_km,
        dx_half_km=fine_scenario.dx_km,
        cumD_coarse=coarse,
        cumD_fine=fine,
        relative_change=change,
        passed=change < MAX_CHANGE,
        config_hash=digest,
    )
    directory = req.output.directory
    directory.mkdir(parents=True, exist_ok=True)
    files = [write_document(report, directory, "convergence.json")]
    write_manifest(directory, req.command.value, digest, files)
    return 0


command = Command(
    name=CommandName.convergence,
    help="compare terminal deliveries at dx and dx/2",
    handler=convergence,
)
