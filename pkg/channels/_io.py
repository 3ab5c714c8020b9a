from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from qstate import decode_complex, encode_complex, parse_document, read_json
from qstate.errors import LabError, MalformedInputError

from ._spec import ChannelSpec, GateStep


class StepDocument(BaseModel):
    support: list[int]
    matrix: list[tuple[float, float]]


class CircuitDocument(BaseModel):
    n_a: int = Field(alias="nA")
    n_b: int = Field(alias="nB")
    steps: list[StepDocument] = []


def channel_to_document(channel: ChannelSpec) -> dict:
    """{"nA", "nB", "steps": [{"support", "matrix"}]} with row-major complex matrices."""
    return {
        "nA": channel.n_a,
        "nB": channel.n_b,
        "steps": [
            {"support": list(step.support), "matrix": encode_complex(step.unitary)}
            for step in channel.steps
        ],
    }


def channel_from_document(data: Any) -> ChannelSpec:
    doc = parse_document(CircuitDocument, data)
    try:
        steps = []
        for step in doc.steps:
            dim = 2 ** len(step.support)
            steps.append(GateStep(decode_complex(step.matrix, (dim, dim)), step.support))
        return ChannelSpec(doc.n_a, doc.n_b, steps)
    except MalformedInputError:
        raise
    except LabError as exc:
        raise MalformedInputError(f"Invalid circuit document: {exc}") from exc


def load_channel(path: str | Path) -> ChannelSpec:
    """Read a circuit JSON file."""
    return channel_from_document(read_json(path))
