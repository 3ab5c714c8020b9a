import numpy as np
import pytest
from numpy.testing import assert_allclose

from ch2ham import (
    ClockConfig,
    Encoding,
    build,
    certify_gap,
    clock_gap,
    clock_index,
    extract_witness,
    gap_sweep,
    history_basis,
    history_state,
    legal_clock_indices,
)
from channels import ChannelSpec, GateStep, apply_channel, random_channel
from hamiltonian import energy, spectrum
from qstate import (
    PureState,
    RegisterLayout,
    partial_trace,
    random_pure_state,
    trace_norm_distance,
)
from qstate.errors import BudgetExceededError, LayoutError

A1 = RegisterLayout([("A", 1)])
X = np.array([[0, 1], [1, 0]], dtype=complex)


def _clock(channel, L, encoding=Encoding.KITAEV_3LOCAL):
    return build(channel, ClockConfig(channel.T, L, encoding))


def test_clock_strings_are_unary():
    assert clock_index(0, 3) == 0b000
    assert clock_index(1, 3) == 0b100
    assert clock_index(3, 3) == 0b111
    assert list(legal_clock_indices(2)) == [0, 2, 3]


def test_clock_config_is_validated():
    with pytest.raises(ValueError):
        ClockConfig(0, 0)
    with pytest.raises(ValueError):
        ClockConfig(2, -1)
    assert ClockConfig(2, 3, "unary").encoding is Encoding.AS_WRITTEN_UNARY


def test_clock_must_match_gate_count(rng):
    channel = random_channel(1, 1, 2, rng)
    with pytest.raises(LayoutError):
        build(channel, ClockConfig(3, 0))


def test_oversized_legal_space_is_refused():
    with pytest.raises(BudgetExceededError):
        build(ChannelSpec(3, 3), ClockConfig(0, 70))


@pytest.mark.parametrize("L", [0, 4, 16])
def test_history_states_have_zero_energy(L, rng):
    for _ in range(20):
        channel = random_channel(1, 1, 2, rng)
        hc = _clock(channel, L)
        psi = random_pure_state(A1, rng)
        assert abs(energy(hc, history_state(hc, psi))) <= 1e-9


@pytest.mark.parametrize("encoding", list(Encoding))
def test_history_state_has_zero_energy_on_qubit_clock(encoding, rng):
    channel = random_channel(1, 1, 2, rng)
    hc = _clock(channel, 2, encoding)
    history = history_state(hc, random_pure_state(A1, rng))
    embedded = hc.embed(history)
    assert embedded.layout == hc.qubit_layout
    assert abs(energy(hc.base, embedded)) <= 1e-9


@pytest.mark.parametrize("encoding", list(Encoding))
def test_qubit_clock_and_legal_view_share_low_spectrum(encoding, rng):
    channel = random_channel(1, 1, 2, rng)
    hc = _clock(channel, 1, encoding)
    legal = np.linalg.eigvalsh(hc.sparse().toarray())
    full = np.linalg.eigvalsh(hc.base.sparse().toarray())
    assert_allclose(full[full < 0.9], legal[legal < 0.9], atol=1e-9)


def test_legal_blocks_match_dense_diagonalisation(rng):
    channel = random_channel(1, 1, 3, rng)
    hc = _clock(channel, 3)
    summary = spectrum(hc, cutoff=0.5)
    assert summary.method == "legal-blocks"
    assert_allclose(summary.eigenvalues, np.linalg.eigvalsh(hc.sparse().toarray()), atol=1e-9)

    basis = summary.low_energy_basis
    h = hc.sparse().toarray()
    assert_allclose(basis.conj().T @ basis, np.eye(basis.shape[1]), atol=1e-9)
    assert_allclose(
        np.diag(basis.conj().T @ h @ basis).real,
        summary.eigenvalues[: basis.shape[1]],
        atol=1e-9,
    )


def test_history_basis_spans_the_ground_space(rng):
    channel = random_channel(1, 1, 2, rng)
    hc = _clock(channel, 2)
    basis = history_basis(hc)
    assert basis.shape[1] == 2
    assert_allclose(basis.conj().T @ basis, np.eye(2), atol=1e-12)
    assert_allclose(basis.conj().T @ (hc.sparse() @ basis), np.zeros((2, 2)), atol=1e-9)
    assert spectrum(hc, cutoff=1e-9).low_energy_dimension == 2


def test_history_input_must_live_on_a(rng):
    hc = _clock(random_channel(1, 1, 2, rng), 0)
    with pytest.raises(LayoutError):
        history_state(hc, random_pure_state(RegisterLayout([("B", 1)]), rng))


def test_history_output_is_within_the_idle_bound(rng):
    for _ in range(20):
        channel = random_channel(1, 1, 2, rng)
        L = int(rng.integers(0, 9))
        hc = _clock(channel, L)
        psi = random_pure_state(A1, rng)
        history = history_state(hc, psi)
        distance = trace_norm_distance(partial_trace(history, "B"), apply_channel(channel, psi))
        assert distance <= 2 * channel.T / hc.time_steps + 1e-9


def test_history_output_bound_is_tight_for_a_late_flip(rng):
    # B stays |0⟩ until the last gate flips it
    channel = ChannelSpec(1, 1, [GateStep(np.eye(2), [0]), GateStep(X, [1])])
    for L in (0, 4, 16):
        hc = _clock(channel, L)
        psi = random_pure_state(A1, rng)
        history = history_state(hc, psi)
        distance = trace_norm_distance(partial_trace(history, "B"), apply_channel(channel, psi))
        bound = 2 * channel.T / hc.time_steps
        assert distance <= bound + 1e-9
        assert distance >= bound / 3


def test_gap_scaling_over_idle_sweep(rng):
    for _ in range(5):
        channel = random_channel(1, 1, 2, rng)
        sweep = gap_sweep(channel, (0, 2, 4, 8, 16))
        df = sweep.dataframe
        assert list(df["L"]) == [0, 2, 4, 8, 16]
        assert (df["gap"] > 0).all()
        assert df["gap"].is_monotonic_decreasing
        assert sweep.exponent >= -3.25
        assert sweep.fits_scaling
        assert len(sweep.to_records()) == 5


def test_gap_sweep_needs_two_lengths(rng):
    with pytest.raises(ValueError):
        gap_sweep(random_channel(1, 1, 2, rng), (4,))


def test_certify_gap_reports_gap_of_the_instance(rng):
    hc = _clock(random_channel(1, 1, 2, rng), 2)
    certificate = certify_gap(hc, (0, 2, 4))
    gap, method = clock_gap(hc)
    assert method == "dense"
    assert certificate.gap == pytest.approx(gap)
    assert certificate.fits_scaling


def test_large_clock_gap_uses_legal_blocks(rng):
    hc = _clock(random_channel(1, 1, 2, rng), 16)
    gap, method = clock_gap(hc)
    assert method == "legal-blocks"
    assert 0 < gap <= 1.0


def test_extracted_witness_satisfies_output_bound(rng):
    for _ in range(20):
        channel = random_channel(1, 1, 2, rng)
        hc = _clock(channel, 4)
        gap, _ = clock_gap(hc)
        history = history_state(hc, random_pure_state(A1, rng))
        noise = rng.normal(size=history.amplitudes.size) + 1j * rng.normal(size=history.amplitudes.size)

        scale = 0.1
        while True:
            rho = PureState.normalized(hc.layout, history.amplitudes + scale * noise / np.linalg.norm(noise))
            beta = energy(hc, rho)
            if beta <= gap / 8:
                break
            scale /= 2

        extraction = extract_witness(hc, rho, beta, gap)
        assert extraction.weight >= 1 - beta / gap - 1e-9
        assert extraction.sigma.layout == A1
        distance = trace_norm_distance(partial_trace(rho, "B"), apply_channel(channel, extraction.sigma))
        assert distance <= extraction.bound + 1e-9
