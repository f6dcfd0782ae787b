from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from ..models.kinds import CommandName, OutputFormat


class OutputSpec(BaseModel):
    format: OutputFormat = OutputFormat.csv
    directory: Path = Path("out")
    stride: Optional[int] = Field(None, ge=1)


class RunRequest(BaseModel):
    scenario: Path
    command: CommandName
    overrides: List[Tuple[str, str]] = Field(default_factory=list)
    output: OutputSpec = OutputSpec()
    paper_fdm: bool = False
    recompute_cap: bool = False
    # optimality check
    alternatives: int = Field(200, ge=0)
    seed: int = 0
    blocks: int = Field(8, ge=1)
    # sweep
    grid: List[Tuple[str, List[str]]] = Field(default_factory=list)

    class Config:
        frozen = True

    @field_validator("overrides", mode="before")
    @classmethod
    def split_overrides(cls, value):
        return [_split(item) if isinstance(item, str) else item for item in value or []]

    @field_validator("grid", mode="before")
    @classmethod
    def split_grid(cls, value):
        out = []
        for item in value or []:
            if isinstance(item, str):
                key, raw = _split(item)
                item = (key, [v.strip() for v in raw.split(",") if v.strip()])
            out.append(item)
        return out


def _split(item: str) -> Tuple[str, str]:
    if "=" not in item:
        raise ValueError(f"expected key=value, got {item!r}")
    key, value = item.split("=", 1)
    return key.strip(), value.strip()
