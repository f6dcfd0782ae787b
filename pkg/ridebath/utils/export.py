"""Artifact writers. Minutes on output, hours inside the engine."""
import json
import logging
import math
from pathlib import Path
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel

from ..models.kinds import OutputFormat
from ..models.record import RunRecord
from ..schemas.report import ManifestResponse, RunSummaryResponse

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"

SERIES_COLUMNS = {
    "t": "t_min",
    "v": "v_kmh",
    "rho": "rho_veh_per_lane_km",
    "N": "N",
    "n00": "n00",
    "n01": "n01",
    "n10": "n10",
    "w": "w",
    "a00": "a00_per_h",
    "p01": "p01_per_h",
    "d10": "d10_per_h",
    "z": "z_km",
    "cumF": "cumF",
    "cumA": "cumA",
    "cumP": "cumP",
    "cumD": "cumD",
    "c": "c",
}
SNAPSHOT_COLUMNS = ["t_min", "x_km", "k01", "k10", "K01", "K10"]
POOLED_SNAPSHOT_COLUMNS = SNAPSHOT_COLUMNS + ["h0c", "hc0"]


def sig9(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return value
    return float(FLOAT_FORMAT % value)


def _rounded(obj):
    if isinstance(obj, float):
        return sig9(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_rounded(v) for v in obj]
    return obj


def series_frame(record: RunRecord) -> pd.DataFrame:
    frame = record.series[list(SERIES_COLUMNS)].rename(columns=SERIES_COLUMNS)
    frame["t_min"] = frame["t_min"] * 60.0
    frame["c"] = frame["c"].astype(int)
    return frame


def snapshots_frame(record: RunRecord) -> pd.DataFrame:
    columns = POOLED_SNAPSHOT_COLUMNS if record.pooled else SNAPSHOT_COLUMNS
    if record.snapshots.empty:
        return pd.DataFrame(columns=columns)
    frame = record.snapshots.rename(columns={"t": "t_min", "x": "x_km"})
    frame["t_min"] = frame["t_min"] * 60.0
    return frame[columns]


def c_series_frame(record: RunRecord) -> pd.DataFrame:
    frame = record.c_series().rename(columns={"t": "t_min"})
    frame["t_min"] = frame["t_min"] * 60.0
    frame["c"] = frame["c"].astype(int)
    return frame


def write_table(frame: pd.DataFrame, directory: Path, stem: str, fmt: OutputFormat) -> str:
    name = f"{stem}.{fmt.value}"
    path = directory / name
    if fmt is OutputFormat.csv:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    else:
        rows = [_rounded(row) for row in frame.to_dict(orient="records")]
        path.write_text(json.dumps(rows, separators=(",", ":")) + "\n", encoding="utf-8")
    return name


def write_document(doc: BaseModel, directory: Path, name: str) -> str:
    payload = _rounded(doc.model_dump(exclude_none=True, mode="json"))
    (directory / name).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return name


def summary_document(record: RunRecord, digest: str, cls=RunSummaryResponse, **extra) -> BaseModel:
    s = record.summary
    minutes = lambda h: None if h is None else h * 60.0  # noqa: E731
    return cls(
        gridlock_time_min=minutes(s.gridlock_time_h),
        t_star_min=minutes(s.t_star_h),
        a_bar_per_h=s.a_bar,
        Z_pax_h=s.Z,
        zbar_min_per_trip=None if s.gridlocked else minutes(s.Zbar_h),
        backlog_pax_h=s.backlog,
        max_rho=s.max_rho,
        config_hash=digest,
        **extra,
    )


def write_run(record: RunRecord, directory: Path, fmt: OutputFormat, digest: str, summary: BaseModel = None) -> List[str]:
    directory.mkdir(parents=True, exist_ok=True)
    files = [
        write_table(series_frame(record), directory, "series", fmt),
        write_table(snapshots_frame(record), directory, "snapshots", fmt),
        write_document(summary or summary_document(record, digest), directory, "summary.json"),
    ]
    return files


def write_manifest(directory: Path, command: str, digest: str, files: List[str]) -> None:
    write_document(ManifestResponse(command=command, config_hash=digest, files=sorted(files)), directory, "manifest.json")
    logger.info("wrote %d artifacts to %s", len(files), directory)
