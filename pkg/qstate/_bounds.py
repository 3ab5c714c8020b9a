import numpy as np

from ._algebra import apply_operator
from ._constants import ZERO_PROBABILITY
from ._state import DensityMatrix, PureState, as_density
from .errors import LayoutError, ZeroProbabilityError

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# Largest value of −x log₂ x, reached at x = 1/e
_ETA_MAX = 1.0 / (np.e * np.log(2))


def fannes_bound(distance: float, dim: int) -> float:
    """
    Continuity bound on |S(ρ) − S(σ)| in bits for ‖ρ − σ‖₁ = distance.

    min(T log₂ d − T log₂ T, T log₂ d + 1/(e ln 2)) for T ≤ 1. Above T = 1
    the first term loses monotonicity and undercuts |S(ρ) − S(σ)| on small
    d (d = 2, T = 3/2: |0⟩⟨0| against diag(1/4, 3/4)), so the monotone
    T log₂ d + 1/(e ln 2) is returned.

    Parameters:
    - distance (float): full trace-norm distance T.
    - dim (int): Hilbert-space dimension d.

    Returns:
    - float: the bound (0 for T ≤ 0).
    """
    t = float(distance)
    if t <= 0:
        return 0.0
    log_d = float(np.log2(dim))
    monotone = t * log_d + _ETA_MAX
    if t > 1.0:
        return monotone
    return min(t * log_d - t * float(np.log2(t)), monotone)


def post_measure(state: PureState | DensityMatrix, measurement, registers=None):
    """
    Outcome probability and post-measurement state for an effect 0 ⪯ M ⪯ I.

    Parameters:
    - state: the measured state.
    - measurement: the effect M, on the full space or on `registers`.
    - registers (optional): register names M acts on.

    Returns:
    - tuple[float, DensityMatrix]: Tr(Mρ) and √M ρ √M / Tr(Mρ).
    """
    rho = as_density(state)
    m = np.asarray(measurement, dtype=complex)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T

    if registers is None:
        if root.shape != (rho.dim, rho.dim):
            raise LayoutError(f"Measurement of shape {m.shape} does not match {rho.layout}")
        post = root @ rho.matrix @ root
    else:
        post = apply_operator(rho, root, registers=registers)

    prob = float(np.trace(post).real)
    if prob <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"Outcome probability {prob:.3e} is zero")
    return prob, DensityMatrix(rho.layout, post / prob, validate=False)


def swap_test_prob(psi: PureState, phi: PureState) -> float:
    """Acceptance probability ½ + ½|⟨ψ|φ⟩|² of the SWAP test."""
    if psi.dim != phi.dim:
        raise LayoutError(f"Dimension mismatch: {psi.dim} vs {phi.dim}")
    return 0.5 + 0.5 * abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2


def swap_test_circuit_prob(psi: PureState, phi: PureState) -> float:
    """
    Acceptance probability of the simulated SWAP-test circuit.

    The ancilla is prepared in |0⟩, Hadamard, controlled-SWAP of the two
    registers, Hadamard, and measured; acceptance is outcome 0.
    """
    if psi.dim != phi.dim:
        raise LayoutError(f"Dimension mismatch: {psi.dim} vs {phi.dim}")
    d = psi.dim

    # Register order: ancilla, ψ, φ
    state = np.zeros((2, d, d), dtype=complex)
    state[0] = np.outer(psi.amplitudes, phi.amplitudes)
    state = np.tensordot(HADAMARD, state, axes=(1, 0))

    # Controlled-SWAP exchanges the two registers on the ancilla-1 branch
    state[1] = state[1].T.copy()

    state = np.tensordot(HADAMARD, state, axes=(1, 0))
    return float(np.linalg.norm(state[0]) ** 2)
