from typing import Iterable

import numpy as np
from scipy import sparse

from qstate import (
    MAX_DENSE_QUBITS,
    DensityMatrix,
    PureState,
    RegisterLayout,
    basis_state,
    embed_operator,
    evolve,
    maximally_entangled_state,
    partial_trace,
    tensor,
)
from qstate.errors import BudgetExceededError, LayoutError

from ._spec import ChannelSpec


# Largest layout (reference included) for which Choi states are built
MAX_CHOI_QUBITS = 10

B_OUTPUT = frozenset({"A", "E"})


def dilation_unitary(channel: ChannelSpec) -> np.ndarray:
    """
    The dense Stinespring unitary V_T ⋯ V₁ on A ⊗ B ⊗ E.

    Parameters:
    - channel (ChannelSpec): the channel.

    Returns:
    - np.ndarray: the unitary, identity for an empty gate sequence.
    """
    n = channel.layout.total_qubits
    if n > MAX_DENSE_QUBITS:
        raise BudgetExceededError(f"Dilation on {n} qubits exceeds {MAX_DENSE_QUBITS}")

    sites = [2] * n
    total = sparse.identity(2**n, dtype=complex, format="csr")
    for step in channel.steps:
        total = embed_operator(step.unitary, sites, step.support) @ total
    return total.toarray()


def _check_input(channel: ChannelSpec, state):
    expected = RegisterLayout([("A", channel.n_a)])
    if state.layout != expected:
        raise LayoutError(f"Channel input must live on {expected}, got {state.layout}")


def run_dilation(channel: ChannelSpec, state: PureState | DensityMatrix):
    """
    Apply the dilation to an input on A, with B and E initialised to |0⟩.

    Returns:
    - PureState | DensityMatrix: the state on A, B, E.
    """
    _check_input(channel, state)
    zeros = basis_state(channel.layout.subset(["B", "E"]))
    full = tensor(state, zeros if isinstance(state, PureState) else zeros.density())
    for step in channel.steps:
        full = evolve(full, step.unitary, qubits=step.support)
    return full


def apply_channel(
    channel: ChannelSpec,
    state: PureState | DensityMatrix,
    trace_out: Iterable[str] = B_OUTPUT,
) -> DensityMatrix:
    """
    Channel output Tr_{trace_out}(U (ρ ⊗ |0⟩⟨0|_B ⊗ |0⟩⟨0|_E) U†).

    Parameters:
    - channel (ChannelSpec): the channel.
    - state: input on register A.
    - trace_out: registers discarded; {"A", "E"} gives the B-output channel,
      {"E"} the full A, B output.

    Returns:
    - DensityMatrix: the output state.
    """
    full = run_dilation(channel, state)
    keep = channel.layout.complement(trace_out)
    return partial_trace(full, keep)


def choi_state(channel: ChannelSpec, trace_out: Iterable[str] = B_OUTPUT) -> DensityMatrix:
    """
    Normalised Choi state (1/2^{n_A}) Σᵢⱼ |i⟩⟨j|_R ⊗ Φ(|i⟩⟨j|).

    Computed by sending half of a maximally entangled R–A pair through the
    dilation.

    Returns:
    - DensityMatrix: the state on R followed by the output registers.
    """
    n = channel.layout.total_qubits + channel.n_a
    if n > MAX_CHOI_QUBITS:
        raise BudgetExceededError(f"Choi state needs {n} qubits, more than {MAX_CHOI_QUBITS}")

    reference = RegisterLayout([("R", channel.n_a)])
    pair = maximally_entangled_state(reference, channel.layout.subset("A"))
    state = tensor(pair, basis_state(channel.layout.subset(["B", "E"])))

    shift = channel.n_a
    for step in channel.steps:
        state = evolve(state, step.unitary, qubits=[q + shift for q in step.support])

    keep = ("R",) + channel.layout.complement(trace_out)
    return partial_trace(state, keep)


def apply_choi(choi: DensityMatrix, state: DensityMatrix) -> DensityMatrix:
    """
    Channel output from its normalised Choi state: Φ(ρ) = d_A Tr_R[(ρᵀ ⊗ I) J].
    """
    d_in = choi.layout.register("R").dim
    if state.dim != d_in:
        raise LayoutError(f"Input of dimension {state.dim} for a Choi state with reference {d_in}")

    out_layout = choi.layout.subset(choi.layout.complement("R"))
    d_out = out_layout.dim
    j = choi.matrix.reshape(d_in, d_out, d_in, d_out)
    out = d_in * np.einsum("ji,jaib->ab", state.matrix, j)
    return DensityMatrix(out_layout, out, validate=False)
