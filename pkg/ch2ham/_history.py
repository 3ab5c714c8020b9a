import numpy as np

from qstate import PureState, RegisterLayout
from qstate.errors import LayoutError

from ._build import ClockHamiltonian


def _work_input(hc: ClockHamiltonian, amplitudes: np.ndarray) -> np.ndarray:
    # ψ_A ⊗ |0⟩_B ⊗ |0⟩_E, A is the leading register
    ancilla_dim = hc.work_dim // amplitudes.size
    work = np.zeros((amplitudes.size, ancilla_dim), dtype=complex)
    work[:, 0] = amplitudes
    return work.ravel()


def history_state(hc: ClockHamiltonian, psi: PureState) -> PureState:
    """
    (1/√(T+L+1)) Σₜ Uₜ(|ψ⟩ ⊗ |0⟩_B ⊗ |0⟩_E) ⊗ |t⟩_C in the legal view.

    Parameters:
    - hc (ClockHamiltonian): the clock Hamiltonian.
    - psi (PureState): input on register A.

    Returns:
    - PureState: the history state, a zero-energy eigenvector.
    """
    expected = RegisterLayout([("A", hc.channel.n_a)])
    if psi.layout != expected:
        raise LayoutError(f"History input must live on {expected}, got {psi.layout}")
    rows = hc.propagate(_work_input(hc, psi.amplitudes))
    amplitudes = rows.T.ravel() / np.sqrt(hc.time_steps)
    return PureState(hc.layout, amplitudes, validate=False)


def history_basis(hc: ClockHamiltonian) -> np.ndarray:
    """
    Orthonormal columns hist(|i⟩) for every computational input |i⟩ on A.

    Returns:
    - np.ndarray: shape (legal dimension, 2**n_A); spans the zero-energy space.
    """
    d_in = 2**hc.channel.n_a
    columns = np.empty((hc.work_dim * hc.time_steps, d_in), dtype=complex)
    for i in range(d_in):
        start = np.zeros(d_in, dtype=complex)
        start[i] = 1.0
        rows = hc.propagate(_work_input(hc, start))
        columns[:, i] = rows.T.ravel() / np.sqrt(hc.time_steps)
    return columns
