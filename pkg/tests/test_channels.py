import numpy as np
import pytest
from numpy.testing import assert_allclose

from channels import (
    CNOT,
    ChannelSpec,
    GateStep,
    apply_channel,
    apply_choi,
    channel_from_document,
    channel_to_document,
    choi_state,
    constant_channel,
    depolarizing_channel,
    dilation_unitary,
    identity_channel,
    random_channel,
    replacement_channel,
    run_dilation,
    with_purified_input,
)
from qstate import (
    DensityMatrix,
    RegisterLayout,
    maximally_mixed,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    tensor,
)
from qstate.errors import InvalidStateError, LayoutError, MalformedInputError

A1 = RegisterLayout([("A", 1)])


def test_layout_gives_ancilla_of_input_plus_output_size():
    channel = ChannelSpec(2, 1)
    assert channel.layout.to_pairs() == [["A", 2], ["B", 1], ["E", 3]]
    assert channel.ancilla_qubits == [2, 3, 4, 5]
    assert channel.T == 0


def test_gates_are_validated():
    with pytest.raises(InvalidStateError):
        GateStep(np.ones((2, 2)), [0])
    with pytest.raises(LayoutError):
        GateStep(CNOT, [0, 0])
    with pytest.raises(LayoutError):
        ChannelSpec(1, 1, [GateStep(CNOT, [0, 4])])


def test_identity_channel_returns_input(rng):
    rho = random_density_matrix(A1, rng)
    out = apply_channel(identity_channel(), rho)
    assert_allclose(out.matrix, rho.matrix, atol=1e-12)


@pytest.mark.parametrize("make", [depolarizing_channel, replacement_channel])
def test_fully_mixing_channels_output_maximally_mixed(make, rng):
    rho = random_density_matrix(A1, rng)
    out = apply_channel(make(), rho)
    assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)


def test_constant_channel_outputs_zero(rng):
    out = apply_channel(constant_channel(), random_pure_state(A1, rng))
    assert_allclose(out.matrix, np.diag([1.0, 0.0]), atol=1e-12)


def test_dilation_unitary_matches_gate_by_gate_run(rng):
    channel = random_channel(1, 1, 4, rng)
    u = dilation_unitary(channel)
    assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)

    psi = random_pure_state(A1, rng)
    start = np.zeros(2**channel.layout.total_qubits, dtype=complex)
    start[: 2**channel.layout.total_qubits : 2 ** (channel.layout.total_qubits - 1)] = psi.amplitudes
    assert_allclose(run_dilation(channel, psi).amplitudes, u @ start, atol=1e-10)


def test_choi_state_reproduces_channel(rng):
    channel = random_channel(1, 1, 5, rng)
    choi = choi_state(channel)
    assert_allclose(partial_trace(choi, "R").matrix, np.eye(2) / 2, atol=1e-12)
    for _ in range(5):
        rho = random_density_matrix(A1, rng)
        assert_allclose(apply_choi(choi, rho).matrix, apply_channel(channel, rho).matrix, atol=1e-10)


def test_purified_input_traces_out_the_reference(rng):
    channel = random_channel(1, 1, 4, rng)
    purified = with_purified_input(channel)
    assert (purified.n_a, purified.n_b, purified.n_e) == (2, 1, 3)

    rho = random_density_matrix(A1, rng)
    reference = random_density_matrix(RegisterLayout([("R", 1)]), rng)
    joint = tensor(rho, reference)
    joint = DensityMatrix(RegisterLayout([("A", 2)]), joint.matrix, validate=False)
    assert_allclose(
        apply_channel(purified, joint).matrix,
        apply_channel(channel, rho).matrix,
        atol=1e-10,
    )


def test_channel_input_must_live_on_a(rng):
    with pytest.raises(LayoutError):
        apply_channel(identity_channel(), maximally_mixed(RegisterLayout([("B", 1)])))


def test_circuit_document_round_trip(rng):
    channel = random_channel(1, 1, 3, rng)
    doc = channel_to_document(channel)
    assert set(doc) == {"nA", "nB", "steps"}
    back = channel_from_document(doc)
    assert_allclose(dilation_unitary(back), dilation_unitary(channel), atol=1e-12)


def test_circuit_document_with_bad_gate_is_malformed():
    doc = {"nA": 1, "nB": 1, "steps": [{"support": [0], "matrix": [[1, 0], [1, 0], [0, 0], [1, 0]]}]}
    with pytest.raises(MalformedInputError):
        channel_from_document(doc)
    with pytest.raises(MalformedInputError):
        channel_from_document({"nB": 1})
