from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import structlog
from scipy import sparse

from qstate import ATOL, RegisterLayout, embed_operator
from qstate.errors import InvalidStateError, LayoutError

log = structlog.get_logger(__name__)


class LocalTerm:
    """A Hermitian operator acting on an ordered list of qubits."""

    def __init__(self, support: Sequence[int], matrix):
        """
        Parameters:
        - support: distinct qubit indices, first index most significant in `matrix`.
        - matrix: dense or scipy.sparse Hermitian matrix of dimension 2**len(support).
        """
        self._support = tuple(int(q) for q in support)
        if len(set(self._support)) != len(self._support):
            raise LayoutError(f"Term support {self._support} repeats a qubit")

        if sparse.issparse(matrix):
            self._matrix = sparse.csr_array(matrix, dtype=complex)
            residue = abs(self._matrix - self._matrix.conj().T).max() if self._matrix.nnz else 0.0
        else:
            self._matrix = np.array(matrix, dtype=complex)
            self._matrix.setflags(write=False)
            residue = np.abs(self._matrix - self._matrix.conj().T).max()

        dim = 2 ** len(self._support)
        if self._matrix.shape != (dim, dim):
            raise LayoutError(
                f"Term on {len(self._support)} qubits needs a {dim}x{dim} matrix, got {self._matrix.shape}"
            )
        if residue > ATOL:
            raise InvalidStateError(f"Term on {self._support} is not Hermitian")

    @property
    def support(self) -> tuple[int, ...]:
        return self._support

    @property
    def matrix(self):
        return self._matrix

    @property
    def size(self) -> int:
        return len(self._support)

    def dense(self) -> np.ndarray:
        return self._matrix.toarray() if sparse.issparse(self._matrix) else np.asarray(self._matrix)

    @cached_property
    def norm(self) -> float:
        """Operator norm ‖Hⱼ‖∞."""
        if sparse.issparse(self._matrix) and self._matrix.shape[0] > 2**10:
            from scipy.sparse.linalg import eigsh

            return float(abs(eigsh(self._matrix, k=1, which="LM", return_eigenvectors=False)[0]))
        return float(np.abs(np.linalg.eigvalsh(self.dense())).max())

    def __repr__(self) -> str:
        return f"LocalTerm(support={list(self._support)})"


class LocalHamiltonian:
    """
    H = Σⱼ Hⱼ on a qubit register layout.
    """

    def __init__(self, layout: RegisterLayout, terms: Iterable[LocalTerm], locality: int | None = None):
        """
        Parameters:
        - layout (RegisterLayout): registers of the system; all uncompressed.
        - terms: local terms; at least one.
        - locality (int, optional): the k of k-local; defaults to the largest support.
        """
        if not layout.is_qubit_layout:
            raise LayoutError(f"LocalHamiltonian needs a qubit layout, got {layout}")
        self._layout = layout
        self._terms = tuple(terms)
        if not self._terms:
            raise LayoutError("A Hamiltonian needs at least one term")

        n = layout.total_qubits
        for term in self._terms:
            if any(not 0 <= q < n for q in term.support):
                raise LayoutError(f"Term support {term.support} outside {n} qubits")

        largest = max(term.size for term in self._terms)
        self._locality = largest if locality is None else int(locality)
        if largest > self._locality:
            raise LayoutError(f"A term acts on {largest} qubits but locality is {self._locality}")

    @property
    def layout(self) -> RegisterLayout:
        return self._layout

    @property
    def terms(self) -> tuple[LocalTerm, ...]:
        return self._terms

    @property
    def locality(self) -> int:
        return self._locality

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    @property
    def n_qubits(self) -> int:
        return self._layout.total_qubits

    @cached_property
    def _assembled(self) -> sparse.csr_array:
        sites = [2] * self.n_qubits
        total = sparse.csr_array((self._layout.dim, self._layout.dim), dtype=complex)
        for term in self._terms:
            total = total + embed_operator(term.matrix, sites, term.support)
        return total

    def sparse(self) -> sparse.csr_array:
        """The assembled operator (cached)."""
        return self._assembled

    def norm_warnings(self) -> list[str]:
        """Terms with ‖Hⱼ‖∞ > 1, which the sampled estimators assume away."""
        warnings = [
            f"term {j} on {list(term.support)} has norm {term.norm:.6g} > 1"
            for j, term in enumerate(self._terms)
            if term.norm > 1.0 + ATOL
        ]
        if warnings:
            log.warning("term norm exceeds one", count=len(warnings), first=warnings[0])
        return warnings

    def __repr__(self) -> str:
        return f"LocalHamiltonian({self._layout}, terms={self.n_terms}, k={self._locality})"


def assemble(hamiltonian: LocalHamiltonian) -> sparse.csr_array:
    """
    Sparse matrix Σⱼ Hⱼ ⊗ I of a local Hamiltonian.

    Parameters:
    - hamiltonian (LocalHamiltonian): the Hamiltonian.

    Returns:
    - scipy.sparse.csr_array: the Hermitian operator on the full space.
    """
    return hamiltonian.sparse()


@dataclass(frozen=True)
class GibbsSpec:
    """Inverse temperature of a thermal state."""

    beta: float

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ValueError(f"Inverse temperature must be finite and positive, got {self.beta}")
