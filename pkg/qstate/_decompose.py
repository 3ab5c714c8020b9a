from typing import Iterable, NamedTuple

import numpy as np

from ._constants import EIGEN_CLAMP
from ._layout import RegisterLayout
from ._state import DensityMatrix, PureState
from .errors import BudgetExceededError, LayoutError


class SchmidtTerm(NamedTuple):
    coefficient: float
    left: PureState
    right: PureState


def cut_matrix(psi: PureState, cut: Iterable[str] | str):
    """Reshape ψ into a (cut, rest) matrix and return it with both layouts."""
    layout = psi.layout
    left = layout.resolve(cut)
    right = layout.complement(left)
    if not left or not right:
        raise LayoutError(f"Trivial cut {left} | {right}")

    order = [layout.index(n) for n in left + right]
    left_layout = layout.subset(left)
    right_layout = layout.subset(right)
    matrix = (
        psi.amplitudes.reshape(layout.dims)
        .transpose(order)
        .reshape(left_layout.dim, right_layout.dim)
    )
    return matrix, left_layout, right_layout


def schmidt_coefficients(psi: PureState, cut: Iterable[str] | str) -> np.ndarray:
    """Schmidt coefficients across the cut, descending."""
    matrix, _, _ = cut_matrix(psi, cut)
    return np.linalg.svd(matrix, compute_uv=False)


def schmidt(psi: PureState, cut: Iterable[str] | str) -> list[SchmidtTerm]:
    """
    Schmidt decomposition ψ = Σ λᵢ |uᵢ⟩|vᵢ⟩ across `cut` | rest.

    Parameters:
    - psi (PureState): the state.
    - cut: registers on the left side of the cut.

    Returns:
    - list[SchmidtTerm]: non-zero terms sorted by descending coefficient.
    """
    matrix, left_layout, right_layout = cut_matrix(psi, cut)
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    return [
        SchmidtTerm(float(s[i]), PureState(left_layout, u[:, i]), PureState(right_layout, vh[i]))
        for i in range(len(s))
        if s[i] > EIGEN_CLAMP
    ]


def purify(rho: DensityMatrix, purifier_name: str, qubits: int | None = None) -> PureState:
    """
    Purification Σ √λᵢ |vᵢ⟩|i⟩ built from the eigendecomposition of ρ.

    Parameters:
    - rho (DensityMatrix): the state to purify.
    - purifier_name (str): name of the new register.
    - qubits (int, optional): purifier size; defaults to ρ's qubit count.

    Returns:
    - PureState: a state on ρ's layout followed by the purifier.
    """
    qubits = rho.layout.total_qubits if qubits is None else qubits
    w, v = np.linalg.eigh((rho.matrix + rho.matrix.conj().T) / 2)

    # Largest eigenvalues first so a pure ρ lands on |0…0⟩ of the purifier
    order = np.argsort(w)[::-1]
    w = np.clip(w[order], 0.0, None)
    v = v[:, order]
    rank = int(np.sum(w > EIGEN_CLAMP))
    if rank > 2**qubits:
        raise BudgetExceededError(f"Rank {rank} does not fit a {qubits}-qubit purifier")

    matrix = np.zeros((rho.dim, 2**qubits), dtype=complex)
    matrix[:, :rank] = v[:, :rank] * np.sqrt(w[:rank])
    layout = rho.layout.concat(RegisterLayout([(purifier_name, qubits)]))
    return PureState.normalized(layout, matrix.ravel())


def align_purification(phi: PureState, psi: PureState, purifier: Iterable[str] | str) -> np.ndarray:
    """
    Unitary U on the purifier maximising |⟨ψ|(I ⊗ U)|φ⟩|.

    Parameters:
    - phi, psi (PureState): states on the same layout.
    - purifier: registers forming the purifying side.

    Returns:
    - np.ndarray: U acting on the purifier registers in layout order. The
      achieved overlap equals ‖M_ψ† M_φ‖₁ (Uhlmann).
    """
    if phi.layout != psi.layout:
        raise LayoutError(f"Layouts differ: {phi.layout} vs {psi.layout}")
    layout = phi.layout
    side = layout.resolve(purifier)
    system = layout.complement(side)

    m_phi, _, _ = cut_matrix(phi, system)
    m_psi, _, _ = cut_matrix(psi, system)

    # Tr(K Uᵀ) with K = M_ψ† M_φ is maximised by U = conj(A) conj(Bh) for K = A Σ Bh
    k = m_psi.conj().T @ m_phi
    a, _, bh = np.linalg.svd(k)
    return a.conj() @ bh.conj()
