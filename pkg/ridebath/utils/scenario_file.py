"""Reader for `.scn` scenario files.

    # comment
    [network]
    lane_km = 10
    [demand]
    kind = trapezoid_ramp
    params = slope:100, cap:100, end:1

A bare key inside a section resolves to its dotted name when one exists
(`kind` under [demand] is `demand.kind`), otherwise to the plain key.
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

from pydantic import ValidationError

from ..config import get_settings
from ..errors import ScenarioError
from ..schemas.scenario import Scenario

logger = logging.getLogger(__name__)

KEY_PATHS: Dict[str, Tuple[str, ...]] = {
    "lane_km": ("lane_km",),
    "area_km2": ("area_km2",),
    "horizon_h": ("horizon_h",),
    "max_distance_km": ("max_distance_km",),
    "dx_km": ("dx_km",),
    "dt_h": ("dt_h",),
    "n00_init": ("n00_init",),
    "supply_policy": ("supply_policy",),
    "v_floor_kmh": ("v_floor_kmh",),
    "release_dt_h": ("release_dt_h",),
    "demand.kind": ("demand", "kind"),
    "demand.params": ("demand", "parameters"),
    "demand.scale": ("demand", "scale"),
    "sdr.kind": ("speed_density", "kind"),
    "sdr.params": ("speed_density", "parameters"),
    "ell": ("distances", "ell"),
    "ell_prime": ("distances", "ell_prime"),
    "control.mode": ("control", "mode"),
    "control.eps_rho": ("control", "eps_rho"),
    "pooling.mode": ("pooling", "mode"),
    "pooling.c": ("pooling", "c"),
    "c_max": ("pooling", "c_max"),
    "dp.bins": ("dp", "bins"),
    "dp.rollouts": ("dp", "rollouts"),
    "dp.seed": ("dp", "seed"),
    "dp.stages": ("dp", "stages"),
}

REQUIRED = (
    "lane_km", "area_km2", "horizon_h", "max_distance_km", "dx_km", "dt_h",
    "demand.kind", "demand.params", "sdr.kind", "sdr.params", "ell", "ell_prime",
)

SECTION_PREFIX = {
    "network": "",
    "discretization": "",
    "distances": "",
    "demand": "demand.",
    "speed_density": "sdr.",
    "control": "control.",
    "pooling": "pooling.",
    "dp": "dp.",
}

# Errors raised by a nested model's own validator point at the model, not a field.
MODEL_KEYS = {
    ("speed_density",): "sdr.params",
    ("demand",): "demand.params",
    ("distances",): "ell",
    ("distances", "area"): "area_km2",
    ("control",): "control.mode",
    ("pooling",): "pooling.mode",
    ("dp",): "dp.bins",
}

PARAM_KEYS = ("demand.params", "sdr.params")

Values = Dict[str, str]
Lines = Dict[str, Optional[int]]


def resolve_key(raw: str, section: Optional[str]) -> Optional[str]:
    if raw in KEY_PATHS:
        return raw
    prefix = SECTION_PREFIX.get(section or "", "")
    if prefix and f"{prefix}{raw}" in KEY_PATHS:
        return f"{prefix}{raw}"
    return None


def read_scenario_file(path) -> Tuple[Values, Lines]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc.strerror}", path=str(path))
    values: Values = {}
    lines: Lines = {}
    section = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTION_PREFIX:
                raise ScenarioError(f"unknown section [{section}]", path=str(path), line=number)
            continue
        if "=" not in line:
            raise ScenarioError(f"expected key = value, got {line!r}", path=str(path), line=number)
        raw_key, value = (part.strip() for part in line.split("=", 1))
        key = resolve_key(raw_key, section)
        if key is None:
            raise ScenarioError("unknown key", key=raw_key, path=str(path), line=number)
        if key in values:
            raise ScenarioError(f"duplicate key (first set on line {lines[key]})", key=key, path=str(path), line=number)
        values[key] = value
        lines[key] = number
    return values, lines


def apply_overrides(values: Values, lines: Lines, overrides: Iterable[Tuple[str, str]]) -> Tuple[Values, Lines]:
    values, lines = dict(values), dict(lines)
    for key, value in overrides:
        if key not in KEY_PATHS:
            raise ScenarioError("unknown key in override", key=key, path="--set")
        values[key] = value
        lines[key] = None
    return values, lines


def parse_params(text: str, key: str, path=None, line=None) -> Tuple[Tuple[str, float], ...]:
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition(":")
        try:
            if not sep:
                raise ValueError
            pairs.append((name.strip(), float(value)))
        except ValueError:
            raise ScenarioError(f"expected name:value pairs, got {item!r}", key=key, path=path, line=line)
    if not pairs:
        raise ScenarioError("no parameters given", key=key, path=path, line=line)
    return tuple(pairs)


def _location_key(loc: Tuple, message: str) -> Optional[str]:
    loc = tuple(p for p in loc if isinstance(p, str))
    if loc in MODEL_KEYS:
        return MODEL_KEYS[loc]
    for key, key_path in KEY_PATHS.items():
        if loc and loc[:len(key_path)] == key_path:
            return key
    head = message.split(":", 1)[0].strip()
    return head if head in KEY_PATHS else None


def build_scenario(values: Values, lines: Lines, path=None) -> Scenario:
    path = str(path) if path is not None else None
    for key in REQUIRED:
        if key not in values:
            raise ScenarioError("missing required key", key=key, path=path)

    settings = get_settings()
    data: dict = {
        "v_floor_kmh": settings.default_v_floor_kmh,
        "n_floor": settings.n_floor,
        "support_tol": settings.support_tol,
        "dp": {
            "bins": settings.dp_bins,
            "rollouts": settings.dp_rollouts,
            "seed": settings.dp_seed,
            "stages": settings.dp_stages,
        },
    }
    for key, value in values.items():
        if key in PARAM_KEYS:
            value = parse_params(value, key, path, lines.get(key))
        target = data
        key_path = KEY_PATHS[key]
        for part in key_path[:-1]:
            target = target.setdefault(part, {})
        target[key_path[-1]] = value
    data.setdefault("distances", {})["area"] = values["area_km2"]

    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        message = error["msg"].removeprefix("Value error, ")
        key = _location_key(error["loc"], message)
        if key and message.startswith(f"{key}:"):
            message = message[len(key) + 1:].strip()
        raise ScenarioError(message, key=key, path=path, line=lines.get(key) if key else None) from None


def parse_scenario(path, overrides: Iterable[Tuple[str, str]] = ()) -> Scenario:
    values, lines = read_scenario_file(path)
    values, lines = apply_overrides(values, lines, overrides)
    scenario = build_scenario(values, lines, path)
    logger.debug("scenario %s parsed (%d keys)", path, len(values))
    return scenario


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def format_params(params) -> str:
    return ", ".join(f"{name}:{_format(float(value))}" for name, value in params)


def scenario_to_keys(scenario: Scenario) -> Dict[str, str]:
    """Canonical key = value form of a validated scenario; unset optional keys are omitted."""
    keys = {}
    for key, key_path in KEY_PATHS.items():
        node = scenario
        for part in key_path:
            node = getattr(node, part)
        if node is None:
            continue
        keys[key] = format_params(node) if key in PARAM_KEYS else _format(node)
    return keys
