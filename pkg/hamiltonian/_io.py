from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel

from qstate import (
    RegisterLayout,
    decode_complex,
    encode_complex,
    parse_document,
    read_json,
)
from qstate.errors import BudgetExceededError, LabError, MalformedInputError

from ._terms import LocalHamiltonian, LocalTerm

# Terms wider than this are not written out densely
MAX_TERM_QUBITS = 12


class TermDocument(BaseModel):
    support: list[int]
    matrix: list[tuple[float, float]]


class HamiltonianDocument(BaseModel):
    qubits: int
    registers: list[tuple[str, int]]
    terms: list[TermDocument]
    metadata: Optional[dict[str, Any]] = None


def hamiltonian_to_document(hamiltonian: LocalHamiltonian, metadata: dict | None = None) -> dict:
    """
    JSON-ready dictionary of a Hamiltonian.

    Parameters:
    - hamiltonian (LocalHamiltonian): the Hamiltonian to encode.
    - metadata (dict, optional): extra block stored under "metadata".

    Returns:
    - dict: {"qubits", "registers", "terms": [{"support", "matrix"}], "metadata"?}
    """
    terms = []
    for term in hamiltonian.terms:
        if term.size > MAX_TERM_QUBITS:
            raise BudgetExceededError(f"Term on {term.size} qubits is too wide to serialise")
        terms.append({"support": list(term.support), "matrix": encode_complex(term.dense())})

    doc = {
        "qubits": hamiltonian.n_qubits,
        "registers": hamiltonian.layout.to_pairs(),
        "terms": terms,
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return doc


def hamiltonian_from_document(data: Any) -> tuple[LocalHamiltonian, dict]:
    """
    Decode a Hamiltonian dictionary.

    Returns:
    - tuple[LocalHamiltonian, dict]: the Hamiltonian and its metadata block ({} if absent).
    """
    doc = parse_document(HamiltonianDocument, data)
    try:
        layout = RegisterLayout(doc.registers)
        if layout.total_qubits != doc.qubits:
            raise MalformedInputError(
                f"Registers hold {layout.total_qubits} qubits but 'qubits' is {doc.qubits}"
            )
        terms = []
        for term in doc.terms:
            dim = 2 ** len(term.support)
            terms.append(LocalTerm(term.support, decode_complex(term.matrix, (dim, dim))))
        return LocalHamiltonian(layout, terms), dict(doc.metadata or {})
    except MalformedInputError:
        raise
    except LabError as exc:
        raise MalformedInputError(f"Invalid Hamiltonian document: {exc}") from exc


def load_hamiltonian(path: str | Path) -> tuple[LocalHamiltonian, dict]:
    """Read a Hamiltonian JSON file."""
    return hamiltonian_from_document(read_json(path))
