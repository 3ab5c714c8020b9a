from pathlib import Path
from typing import Any, Optional

import numpy as np
import orjson
from pydantic import BaseModel, ValidationError

from ._layout import RegisterLayout
from ._state import DensityMatrix, PureState
from .errors import MalformedInputError

ComplexPairs = list[tuple[float, float]]


def encode_complex(values) -> ComplexPairs:
    """Flatten an array row-major into [[re, im], ...] pairs."""
    flat = np.asarray(values, dtype=complex).ravel()
    return [(float(z.real), float(z.imag)) for z in flat]


def decode_complex(pairs: ComplexPairs, shape: tuple[int, ...]) -> np.ndarray:
    """Inverse of `encode_complex`."""
    array = np.array(pairs, dtype=float).reshape(-1, 2) if pairs else np.zeros((0, 2))
    values = array[:, 0] + 1j * array[:, 1]
    if values.size != int(np.prod(shape)):
        raise MalformedInputError(f"Expected {int(np.prod(shape))} complex entries, got {values.size}")
    return values.reshape(shape)


def read_json(path: str | Path) -> Any:
    """Parse a JSON file, raising MalformedInputError on bad syntax."""
    try:
        return orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc


def parse_document(model: type[BaseModel], data: Any) -> BaseModel:
    """Validate a decoded JSON value against a pydantic model."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise MalformedInputError(f"Invalid {model.__name__}: {exc}") from exc


def dump_json(data: Any) -> bytes:
    return orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY)


class StateDocument(BaseModel):
    """A pure state (`amplitudes`) or density matrix (`matrix`) on named registers."""

    registers: list[tuple[str, int] | tuple[str, int, int]]
    amplitudes: Optional[ComplexPairs] = None
    matrix: Optional[ComplexPairs] = None


def state_to_document(state: PureState | DensityMatrix) -> dict:
    doc = {"registers": state.layout.to_pairs()}
    if isinstance(state, PureState):
        doc["amplitudes"] = encode_complex(state.amplitudes)
    else:
        doc["matrix"] = encode_complex(state.matrix)
    return doc


def state_from_document(data: Any) -> PureState | DensityMatrix:
    doc = parse_document(StateDocument, data)
    layout = RegisterLayout(doc.registers)
    if (doc.amplitudes is None) == (doc.matrix is None):
        raise MalformedInputError("A state document needs exactly one of amplitudes or matrix")
    try:
        if doc.amplitudes is not None:
            return PureState(layout, decode_complex(doc.amplitudes, (layout.dim,)))
        return DensityMatrix(layout, decode_complex(doc.matrix, (layout.dim, layout.dim)))
    except ValueError as exc:
        raise MalformedInputError(str(exc)) from exc
