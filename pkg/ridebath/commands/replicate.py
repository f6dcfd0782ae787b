"""Reference-number replication report.

The literal demand magnitude cannot load the network, so the demand unit is
first calibrated by scanning scale factors and keeping the one whose
uncontrolled run gridlocks closest to the reference time. Every item is then
reported as pass or deviation against the configured tolerance.
"""
import logging
from typing import Dict, Optional

import numpy as np

from ..config import get_settings
from ..errors import RideBathError
from ..models.kinds import CommandName
from ..schemas.report import ReplicationItem, ReplicationResponse
from ..schemas.request import RunRequest
from ..services.control import policy_for
from ..services.dp import dp_optimize
from ..services.dynamics import RunOptions, run
from ..utils.export import write_document, write_manifest
from .base import Command, load

logger = logging.getLogger(__name__)

SCALES = (1.0, 10.0, 60.0, 100.0, 150.0, 200.0, 300.0)
GRIDLOCK_MIN = 37.4
PLATEAU_KMH = 6.0
PLATEAU_WINDOW_MIN = 54.0
CONTROLLED_ZBAR_MIN = 37.18
DP_SIZE = 2
DP_ZBAR_MIN = 31.21
DP_C_MAX = 3
NO_CONTROL_C_MAX = 7


def _item(name: str, target: float, measured: Optional[float], unit: str, tol: float, note: str = None) -> ReplicationItem:
    if measured is None:
        status = "deviation"
    else:
        status = "pass" if abs(measured - target) <= tol * abs(target) else "deviation"
    return ReplicationItem(item=name, target=target, measured=measured, unit=unit, status=status, note=note)


def _uncontrolled_gridlock(req: RunRequest, scale: float) -> Optional[float]:
    scenario, _ = load(req, [("demand.scale", repr(scale)), ("control.mode", "none"), ("pooling.mode", "off")])
    record = run(scenario, policy_for(scenario), options=RunOptions(snapshots=False))
    t = record.summary.gridlock_time_h
    return None if t is None else t * 60.0


def plateau(series, rho_k: float, band: float):
    """Mean speed and duration (min) of the saturated stretch of a controlled run."""
    saturated = series["rho"].to_numpy() >= rho_k - band
    if not saturated.any():
        return None, None
    t = series["t"].to_numpy()
    idx = np.nonzero(saturated)[0]
    window = (t[idx[-1]] - t[idx[0]]) * 60.0
    return float(series["v"].to_numpy()[saturated].mean()), float(window)


def replicate(req: RunRequest) -> int:
    settings = get_settings()
    tol = settings.replication_tolerance
    base, digest = load(req)

    scan: Dict[str, Optional[float]] = {}
    for scale in SCALES:
        try:
            scan[repr(scale)] = _uncontrolled_gridlock(req, scale * base.demand.scale)
        except RideBathError as exc:
            logger.warning("scale %g failed: %s", scale, exc.detail)
            scan[repr(scale)] = None
    hits = {float(s): t for s, t in scan.items() if t is not None}
    calibration = None
    if hits:
        factor = min(hits, key=lambda s: (abs(hits[s] - GRIDLOCK_MIN), s))
    else:
        factor = 1.0
        calibration = f"no factor in {list(SCALES)} gridlocks the uncontrolled run; literal demand kept"
        logger.warning(calibration)
    scale = factor * base.demand.scale
    logger.info("demand scale %g selected (gridlock times %s)", scale, scan)

    items = [_item("uncontrolled_gridlock_time", GRIDLOCK_MIN, hits.get(factor), "min", tol,
                   None if hits else "no scale factor produced a gridlock")]

    scaled = [("demand.scale", repr(scale)), ("pooling.mode", "off")]
    controlled, _ = load(req, scaled + [("control.mode", "db")])
    record = run(controlled, policy_for(controlled), options=RunOptions(drain=True, snapshots=False))
    band = max(controlled.eps_rho, 0.02 * record.summary.rho_k)
    speed, window = plateau(record.series, record.summary.rho_k, band)
    zbar = None if record.summary.Zbar_h is None else record.summary.Zbar_h * 60.0
    items += [
        _item("controlled_plateau_speed", PLATEAU_KMH, speed, "km/h", tol),
        _item("controlled_plateau_window", PLATEAU_WINDOW_MIN, window, "min", tol),
        _item("controlled_zbar", CONTROLLED_ZBAR_MIN, zbar, "min/trip", tol,
              None if record.summary.drained else "backlog not drained"),
    ]

    pooled, _ = load(req, [("demand.scale", repr(scale)), ("control.mode", "db"),
                           ("pooling.mode", "dp"), ("c_max", str(DP_C_MAX))])
    result = dp_optimize(pooled)
    constant = len(set(result.sizes)) == 1
    items += [
        _item("dp_constant_size", DP_SIZE, float(result.sizes[0]) if constant else None, "pax/veh", 0.0,
              f"schedule {list(result.sizes)}"),
        _item("dp_zbar", DP_ZBAR_MIN, None if result.Zbar is None else result.Zbar * 60.0, "min/trip", tol),
    ]

    saturated, _ = load(req, [("demand.scale", repr(scale)), ("control.mode", "none"),
                              ("pooling.mode", "saturated"), ("c_max", str(NO_CONTROL_C_MAX))])
    free = run(saturated, policy_for(saturated), options=RunOptions(drain=True, snapshots=False))
    items.append(ReplicationItem(
        item="c_max_7_without_control",
        target=0.0,
        measured=1.0 if free.summary.gridlocked else 0.0,
        unit="gridlocked",
        status="deviation" if free.summary.gridlocked else "pass",
    ))

    report = ReplicationResponse(demand_scale=scale, scan=scan, calibration=calibration, tolerance=tol,
                                 items=items, config_hash=digest)
    directory = req.output.directory
    directory.mkdir(parents=True, exist_ok=True)
    files = [write_document(report, directory, "replication.json")]
    write_manifest(directory, req.command.value, digest, files)
    for item in items:
        logger.info("%s: %s (target %g, measured %s)", item.item, item.status, item.target, item.measured)
    return 0


command = Command(
    name=CommandName.replicate,
    help="calibrate the demand unit and report the reference numbers",
    handler=replicate,
)
