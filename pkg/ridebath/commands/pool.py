import logging

from ..errors import ScenarioError
from ..models.kinds import CommandName, PoolingMode
from ..schemas.report import PoolingSummaryResponse
from ..schemas.request import RunRequest
from ..services.control import policy_for
from ..services.dp import dp_optimize
from ..services.dynamics import run
from ..services.pooling import total_cost
from ..utils.export import c_series_frame, summary_document, write_manifest, write_run, write_table
from .base import Command, load, run_options

logger = logging.getLogger(__name__)


def pool(req: RunRequest) -> int:
    scenario, digest = load(req)
    mode = scenario.pooling.mode
    if mode is PoolingMode.off:
        raise ScenarioError("pool needs pooling.mode = fixed, saturated or dp", key="pooling.mode")

    if mode is PoolingMode.dp:
        result = dp_optimize(scenario)
        record = result.record
        extra = dict(
            c_schedule=list(result.sizes),
            c_source=result.source,
            candidate_Z_pax_h={k: (v if v != float("inf") else None) for k, v in result.candidates.items()},
        )
    else:
        policy = policy_for(scenario, recompute_cap=req.recompute_cap)
        record = run(scenario, policy, options=run_options(req))
        extra = dict(c_source=mode.value)
    Z, _ = total_cost(record)
    logger.info("pooled cost %.6g pax*h", Z)

    directory = req.output.directory
    summary = summary_document(record, digest, cls=PoolingSummaryResponse, **extra)
    files = write_run(record, directory, req.output.format, digest, summary=summary)
    files.append(write_table(c_series_frame(record), directory, "c_series", req.output.format))
    write_manifest(directory, req.command.value, digest, files)
    return 0


command = Command(
    name=CommandName.pool,
    help="pooled run with a fixed, saturated or dp-optimized pooling size",
    handler=pool,
)
