from dataclasses import dataclass, field
from functools import singledispatch
from typing import Any, Optional

import numpy as np
import structlog
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from qstate import (
    ATOL,
    DENSE_NORM_QUBITS,
    LEVEL_TOL,
    MAX_DENSE_QUBITS,
    DensityMatrix,
    PureState,
)
from qstate.errors import ConvergenceError, LayoutError

log = structlog.get_logger(__name__)


@dataclass(frozen=True)
class SpectralSummary:
    """
    Low-lying spectrum of a Hamiltonian.

    Attributes:
        ground_energy: λ_min.
        gap: distance between the two lowest distinct levels (0 if only one level is known).
        eigenvalues: every eigenvalue that was computed, ascending.
        low_energy_basis: orthonormal columns spanning the eigenvectors with energy ≤ cutoff
            (None when no cutoff was requested).
        cutoff: the requested cutoff.
        method: "dense", "lanczos" or "legal-blocks".
    """

    ground_energy: float
    gap: float
    eigenvalues: np.ndarray
    low_energy_basis: Optional[np.ndarray] = None
    cutoff: Optional[float] = None
    method: str = "dense"
    details: dict = field(default_factory=dict)

    @property
    def low_energy_dimension(self) -> int:
        return 0 if self.low_energy_basis is None else self.low_energy_basis.shape[1]

    def low_energy_values(self) -> np.ndarray:
        """Eigenvalues belonging to the low-energy basis vectors."""
        return self.eigenvalues[: self.low_energy_dimension]


def spectral_gap(eigenvalues: np.ndarray) -> float:
    """Difference of the two lowest distinct levels, merging values within LEVEL_TOL."""
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    above = w[w > w[0] + LEVEL_TOL]
    return float(above[0] - w[0]) if above.size else 0.0


def _dense_summary(matrix: np.ndarray, cutoff: float | None) -> SpectralSummary:
    w, v = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    basis = None
    if cutoff is not None:
        basis = v[:, w <= cutoff + ATOL]
    return SpectralSummary(float(w[0]), spectral_gap(w), w, basis, cutoff, "dense")


def _lanczos_summary(operator, cutoff: float | None) -> SpectralSummary:
    dim = operator.shape[0]
    k = min(6, dim - 2)
    while True:
        try:
            w, v = eigsh(operator, k=k, which="SA", tol=1e-12)
        except ArpackNoConvergence as exc:
            residual = None
            if exc.eigenvectors is not None and len(exc.eigenvalues):
                r = operator @ exc.eigenvectors - exc.eigenvectors * exc.eigenvalues
                residual = float(np.linalg.norm(r, axis=0).max())
            log.error("lanczos did not converge", k=k, residual=residual)
            raise ConvergenceError("Lanczos eigensolver did not converge", residual) from exc

        order = np.argsort(w)
        w, v = w[order], v[:, order]
        enough_levels = spectral_gap(w) > 0
        enough_cutoff = cutoff is None or w[-1] > cutoff + ATOL
        if (enough_levels and enough_cutoff) or k >= dim - 2:
            break
        k = min(2 * k, dim - 2)
        log.debug("extending lanczos window", k=k)

    basis = None if cutoff is None else v[:, w <= cutoff + ATOL]
    return SpectralSummary(float(w[0]), spectral_gap(w), w, basis, cutoff, "lanczos")


@singledispatch
def spectrum(hamiltonian: Any, cutoff: float | None = None) -> SpectralSummary:
    """
    Ground energy, spectral gap and low-energy basis.

    Works for any object exposing `layout` and `sparse()`. Spaces up to
    2**MAX_DENSE_QUBITS are diagonalised densely; larger ones use Lanczos.

    Parameters:
    - hamiltonian: the Hamiltonian.
    - cutoff (float, optional): keep eigenvectors with energy ≤ cutoff.

    Returns:
    - SpectralSummary: the summary.
    """
    operator = hamiltonian.sparse()
    dim = operator.shape[0]
    if dim <= 2**MAX_DENSE_QUBITS:
        log.debug("dense spectrum", dim=dim)
        return _dense_summary(operator.toarray(), cutoff)
    log.debug("lanczos spectrum", dim=dim)
    return _lanczos_summary(operator, cutoff)


def energy(hamiltonian: Any, state: PureState | DensityMatrix) -> float:
    """
    Expectation value Tr(Hρ).

    Parameters:
    - hamiltonian: any object exposing `layout` and `sparse()`.
    - state: a state on the same layout.

    Returns:
    - float: the real part of Tr(Hρ).
    """
    if state.layout != hamiltonian.layout:
        raise LayoutError(f"State on {state.layout} but Hamiltonian on {hamiltonian.layout}")
    operator = hamiltonian.sparse()
    if isinstance(state, PureState):
        psi = state.amplitudes
        value = np.vdot(psi, operator @ psi)
    else:
        value = operator.multiply(state.matrix.T).sum()
    if abs(value.imag) > ATOL * max(1.0, abs(value.real)):
        log.warning("energy has imaginary residue", imag=float(value.imag))
    return float(value.real)


def operator_norm(hamiltonian: Any) -> float:
    """
    ‖H‖∞, exact for up to DENSE_NORM_QUBITS qubits, Lanczos (tol 1e-6) beyond.
    """
    operator = hamiltonian.sparse()
    if operator.shape[0] <= 2**DENSE_NORM_QUBITS:
        w = np.linalg.eigvalsh(operator.toarray())
        return float(np.abs(w).max())
    w = eigsh(sparse.csr_array(operator), k=1, which="LM", tol=1e-6, return_eigenvectors=False)
    return float(abs(w[0]))
