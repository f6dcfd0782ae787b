from ..models.kinds import CommandName
from ..schemas.report import AlternativeResponse, OptimalityReportResponse
from ..schemas.request import RunRequest
from ..services.optimality import optimality_probe
from ..utils.export import write_document, write_manifest
from .base import Command, load


def compare_controls(req: RunRequest) -> int:
    scenario, digest = load(req)
    result = optimality_probe(scenario, req.alternatives, seed=req.seed, blocks=req.blocks)
    if result.passed:
        verdict = "PASS"
    else:
        verdict = "ADVISORY-FAIL" if result.advisory else "FAIL"
    report = OptimalityReportResponse(
        verdict=verdict,
        Z_db_pax_h=result.Z_db,
        n_alternatives=req.alternatives,
        n_excluded=len(result.alternatives) - len(result.evaluated),
        worst_margin=result.worst_margin,
        seed=req.seed,
        blocks=req.blocks,
        notes=result.notes,
        alternatives=[
            AlternativeResponse(index=a.index, fractions=a.fractions, Z_pax_h=a.Z, excluded=a.excluded)
            for a in result.alternatives
        ],
        config_hash=digest,
    )
    directory = req.output.directory
    directory.mkdir(parents=True, exist_ok=True)
    files = [write_document(report, directory, "probe_report.json")]
    write_manifest(directory, req.command.value, digest, files)
    return 0


command = (
    Command(
        name=CommandName.probe,
        help="compare density-based admission against random admissible controls",
        handler=compare_controls,
    )
    .argument("--alternatives", type=int, default=200, help="number of random controls")
    .argument("--seed", type=int, default=0)
    .argument("--blocks", type=int, default=8, help="piecewise-constant blocks over [0, T]")
)
