import numpy as np

from ._state import DensityMatrix, PureState, as_density
from .errors import LayoutError


def _check_dims(a, b):
    if a.dim != b.dim:
        raise LayoutError(f"Dimension mismatch: {a.dim} vs {b.dim}")


def trace_norm_distance(rho: PureState | DensityMatrix, sigma: PureState | DensityMatrix) -> float:
    """
    Full trace-norm distance ‖ρ − σ‖₁, in [0, 2] for states.

    Parameters:
    - rho, sigma: states of equal dimension.

    Returns:
    - float: sum of the absolute eigenvalues of ρ − σ.
    """
    _check_dims(rho, sigma)
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        overlap = abs(np.vdot(rho.amplitudes, sigma.amplitudes)) ** 2
        return float(2.0 * np.sqrt(max(0.0, 1.0 - overlap)))
    diff = as_density(rho).matrix - as_density(sigma).matrix
    diff = (diff + diff.conj().T) / 2
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def pure_state_distance(psi: PureState, phi: PureState) -> float:
    """Half-norm distance √(1 − |⟨ψ|φ⟩|²) between pure states."""
    _check_dims(psi, phi)
    overlap = abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2
    return float(np.sqrt(max(0.0, 1.0 - overlap)))


def fidelity(rho: PureState | DensityMatrix, sigma: PureState | DensityMatrix) -> float:
    """
    Uhlmann fidelity (Tr√(√ρ σ √ρ))², equal to |⟨ψ|φ⟩|² for pure states.

    Parameters:
    - rho, sigma: states of equal dimension.

    Returns:
    - float: the fidelity in [0, 1].
    """
    _check_dims(rho, sigma)
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        return float(min(1.0, abs(np.vdot(rho.amplitudes, sigma.amplitudes)) ** 2))
    if isinstance(rho, PureState) or isinstance(sigma, PureState):
        psi, other = (rho, sigma) if isinstance(rho, PureState) else (sigma, rho)
        value = np.vdot(psi.amplitudes, other.matrix @ psi.amplitudes).real
        return float(min(1.0, max(0.0, value)))

    # Square root of ρ from its eigendecomposition
    w, v = np.linalg.eigh((rho.matrix + rho.matrix.conj().T) / 2)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = root @ sigma.matrix @ root
    eig = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
    return float(min(1.0, np.sqrt(eig).sum() ** 2))
