import hashlib
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field

from qstate import dump_json

from . import VERSION


class RunReport(BaseModel):
    """
    Machine-readable record of one CLI run, written to stdout.

    `results` carries every number the subcommand produced; re-running with
    the same arguments and seed reproduces it exactly. `wall_clock` is the
    only field expected to change between runs.
    """

    command: list[str]
    version: str = VERSION
    seed: int
    threads: int = Field(ge=1)
    restarts: int = Field(ge=1)
    inputs: dict[str, str] = {}
    seeds: list[int] = []
    results: dict[str, Any] = {}
    exit_code: int
    error: Optional[str] = None
    wall_clock: float = Field(ge=0)


def input_hash(path: str | Path) -> str:
    """
    Hash an input file.

    Parameters:
    - path (str | Path): the file.

    Returns:
    - str: "sha256:<hex digest>" of its bytes.
    """
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


def render(report: RunReport) -> str:
    """The report as indented JSON text."""
    return dump_json(report.model_dump(mode="python")).decode()


def report_schema() -> dict:
    return RunReport.model_json_schema()
