import numpy as np
import pytest
from numpy.testing import assert_allclose

from entropy_protocol import (
    ProtocolConfig,
    apply_extractor,
    certified_entropy_bound,
    completeness,
    entropy_slack,
    extractor_dilation,
    flatten,
    high_min_entropy_state,
    honest_prover_state,
    make_extractor,
    misaligned_state,
    pauli_twirl_extractor,
    protocol_layout,
    random_promise_state,
    run_fea_protocol,
    run_heles_protocol,
    run_protocol,
    solve_parameters,
    tensor_power,
    verifier_delta,
)
from hamiltonian import PAULI_Z, LocalHamiltonian, LocalTerm
from qstate import (
    DensityMatrix,
    RegisterLayout,
    basis_state,
    evolve,
    maximally_entangled_state,
    maximally_mixed,
    min_entropy,
    partial_trace,
    random_density_matrix,
    tensor,
    trace_norm_distance,
    vn_entropy,
)
from qstate.errors import BudgetExceededError, LayoutError, PromiseViolationError

A1 = RegisterLayout([("A", 1)])
B1 = RegisterLayout([("B", 1)])


def _bell_pair() -> DensityMatrix:
    return maximally_entangled_state(A1, B1).density()


def _config(q: int, tau: float = 1.0, epsilon: float = 1e-6) -> ProtocolConfig:
    c = completeness(epsilon)
    return ProtocolConfig(tau=tau, q=q, epsilon=epsilon, delta=0.1, delta_prime=0.25, s=0.9 * c, n_a=1)


def test_completeness_and_threshold_validation():
    assert completeness(0.0) == 1.0
    assert completeness(1e-6) == pytest.approx(1 - 4 * np.sqrt(3e-6))
    with pytest.raises(ValueError):
        ProtocolConfig(tau=1, q=1, epsilon=1e-6, delta=0.1, delta_prime=0.1, s=0.9999)
    with pytest.raises(ValueError):
        ProtocolConfig(tau=1, q=0, epsilon=1e-6, delta=0.1, delta_prime=0.1, s=0.5)


def test_solved_parameters_meet_the_entropy_slack():
    cfg = solve_parameters(delta=0.5, delta_prime=0.5, n_a=1, tau=1.0)
    assert 0 < cfg.s < cfg.c <= 1
    assert cfg.c - cfg.s >= (1 - cfg.s) / 2
    assert 4 * (3 * cfg.epsilon) ** 0.25 <= 0.5 + 1e-12
    assert entropy_slack(cfg.q, 1, cfg.s, cfg.epsilon) <= 0.5
    if cfg.q > 1:
        assert entropy_slack(cfg.q - 1, 1, cfg.s, cfg.epsilon) > 0.5
    assert cfg.d >= 0


def test_certified_bound_drops_with_seed_length():
    assert certified_entropy_bound(1.0, 2, 1, 0) == 2.0
    assert certified_entropy_bound(0.99, 2, 1, 2) < certified_entropy_bound(0.99, 2, 1, 0)


def test_pauli_twirl_outputs_maximally_mixed(rng):
    x = pauli_twirl_extractor(2)
    assert x.d == 4
    rho = random_density_matrix(RegisterLayout([("A", 2)]), rng)
    assert_allclose(apply_extractor(x, rho).matrix, np.eye(4) / 4, atol=1e-12)


def test_haar_extractor_is_reproducible_from_its_seed():
    first = make_extractor(2, 2, seed=5, battery=10)
    second = make_extractor(2, 2, seed=5, battery=10)
    assert first.d == 2
    assert first.k == pytest.approx(1.0)
    assert first.epsilon == pytest.approx(second.epsilon)
    assert_allclose(first.unitaries[0], second.unitaries[0])


def test_extractor_requests_are_bounded():
    with pytest.raises(ValueError):
        make_extractor(2, 3, kind="pauli")
    with pytest.raises(BudgetExceededError):
        make_extractor(8, 2)
    with pytest.raises(ValueError):
        make_extractor(1, 1, kind="sponge")


def test_extractor_dilation_realises_the_channel(rng):
    x = make_extractor(1, 2, seed=3, battery=5)
    rho = random_density_matrix(A1, rng)
    selectors = basis_state(RegisterLayout([("E", x.d)])).density()
    out = evolve(tensor(rho, selectors), extractor_dilation(x), qubits=[0, 1, 2])
    assert_allclose(partial_trace(out, "A").matrix, apply_extractor(x, rho).matrix, atol=1e-12)


def test_high_min_entropy_states_meet_their_threshold(rng):
    for k in (0.5, 1.0, 1.8):
        assert min_entropy(high_min_entropy_state(2, k, rng)) >= k - 1e-9
    with pytest.raises(ValueError):
        high_min_entropy_state(1, 2.0, rng)


def test_tensor_power_groups_copies_by_register(rng):
    rho = random_density_matrix(RegisterLayout([("A", 1), ("B", 1)]), rng)
    power = tensor_power(rho, 2)
    assert power.layout.to_pairs() == [["A", 2], ["B", 2]]
    rho_a = partial_trace(rho, "A").matrix
    assert_allclose(partial_trace(power, "A").matrix, np.kron(rho_a, rho_a), atol=1e-12)


def test_flattening_stays_close_and_raises_min_entropy():
    rho = DensityMatrix(A1, np.diag([0.8, 0.2]))
    result = flatten(rho, 4, 0.45)
    assert result.discarded == pytest.approx(0.8**4)
    assert result.distance <= 2 * 0.45 + 1e-9
    assert result.min_entropy > 4 * min_entropy(rho)
    assert result.min_entropy >= result.guaranteed_min_entropy
    assert result.state.layout.to_pairs() == [["A", 4]]
    with pytest.raises(ValueError):
        flatten(rho, 2, 0.0)


def test_honest_prover_is_accepted_with_its_own_state():
    x = pauli_twirl_extractor(2)
    rho = _bell_pair()
    prover = honest_prover_state(rho, x, 2)
    assert prover.residual <= 1e-9
    assert prover.state.layout == protocol_layout(1, 1, 2, 4)

    result = run_protocol(prover.state, x, _config(2))
    assert result.accept_probability >= 0.99
    assert result.accepted
    assert trace_norm_distance(result.average_output, rho) <= 0.05
    assert result.entropy == pytest.approx(2.0)
    assert result.certificate_holds
    assert set(result.transcript()) == {"config", "accept_probability", "entropy_certificate"}


def test_honest_prover_aligns_a_biased_marginal(rng):
    x = make_extractor(1, 1, seed=11, battery=5)
    rho = random_density_matrix(RegisterLayout([("A", 1), ("B", 1)]), rng)
    prover = honest_prover_state(rho, x, 1)
    assert prover.residual > 1e-6
    marginal = partial_trace(prover.state, "A")
    assert trace_norm_distance(marginal, maximally_mixed(marginal.layout)) <= 1e-9
    assert 0 < prover.fidelity <= 1


def test_misaligned_state_is_accepted_at_chance():
    layout = protocol_layout(1, 1, 2, 4)
    result = run_protocol(misaligned_state(layout), pauli_twirl_extractor(2), _config(2))
    assert result.accept_probability == pytest.approx(2.0**-4)
    assert not result.accepted
    assert result.certificate_holds


def test_promise_violation_is_refused():
    layout = protocol_layout(1, 1, 2, 4)
    with pytest.raises(PromiseViolationError):
        run_protocol(basis_state(layout).density(), pauli_twirl_extractor(2), _config(2))


def test_selector_register_must_match_extractor():
    layout = protocol_layout(1, 1, 2, 2)
    with pytest.raises(LayoutError):
        run_protocol(misaligned_state(layout), pauli_twirl_extractor(2), _config(2))


def test_entropy_certificate_on_random_promise_states(rng):
    x = pauli_twirl_extractor(2)
    cfg = _config(2)
    layout = protocol_layout(1, 1, 2, 4)
    honest = honest_prover_state(_bell_pair(), x, 2).state.matrix
    accepted = 0
    for _ in range(200):
        p = rng.random()
        noise = random_promise_state(layout, rng, mixture=int(rng.integers(1, 4)))
        chi = DensityMatrix(layout, p * honest + (1 - p) * noise.matrix, validate=False)
        result = run_protocol(chi, x, cfg)
        assert result.accept_probability >= p - 1e-9
        assert result.certificate_holds
        accepted += result.accepted
    assert accepted > 0


def test_protocol_based_verifiers_use_the_average_output():
    x = pauli_twirl_extractor(1)
    chi = honest_prover_state(_bell_pair(), x, 1).state
    cfg = _config(1)
    z = LocalHamiltonian(A1, [LocalTerm([0], PAULI_Z)])
    assert verifier_delta(z, 0.5, 1.0) == pytest.approx(0.125)

    outcome = run_heles_protocol(z, 1.0, 0.5, 1.0, chi, x, cfg)
    assert outcome.accept
    assert outcome.energy == pytest.approx(0.0, abs=1e-12)

    free = -np.log(2)
    assert run_fea_protocol(z, 1.0, -0.8, -0.4, 1.0, chi, x, cfg).statistic == pytest.approx(free)
    assert run_fea_protocol(z, 1.0, -0.8, -0.4, 1.0, chi, x, cfg).accept
    assert not run_fea_protocol(z, 1.0, -1.0, -0.5, 1.0, chi, x, cfg).accept


def test_larger_hamiltonian_norm_tightens_the_closeness():
    z = LocalHamiltonian(A1, [LocalTerm([0], PAULI_Z)])
    z3 = LocalHamiltonian(A1, [LocalTerm([0], 3.0 * PAULI_Z)])
    assert verifier_delta(z3, 0.5, 1.0) == pytest.approx(0.5 / 12)
    assert verifier_delta(z3, 0.5, 1.0) < verifier_delta(z, 0.5, 1.0)

    x = pauli_twirl_extractor(1)
    chi = honest_prover_state(_bell_pair(), x, 1).state
    for h in (z, z3):
        heles = run_heles_protocol(h, 1.0, 0.5, 1.0, chi, x, _config(1))
        assert heles.protocol.config.delta == pytest.approx(verifier_delta(h, 0.5, 1.0))
        fea = run_fea_protocol(h, 1.0, -0.8, -0.4, 1.0, chi, x, _config(1))
        assert fea.protocol.config.delta == pytest.approx(verifier_delta(h, -0.8, -0.4))


def test_verifiers_compare_the_output_against_delta():
    x = pauli_twirl_extractor(1)
    rho = _bell_pair()
    chi = honest_prover_state(rho, x, 1).state
    z = LocalHamiltonian(A1, [LocalTerm([0], PAULI_Z)])

    close = run_heles_protocol(z, 1.0, 0.5, 1.0, chi, x, _config(1), reference=rho)
    assert close.protocol.output_distance <= close.protocol.config.delta
    assert close.protocol.output_within_delta is True

    far = run_heles_protocol(z, 1.0, 0.5, 1.0, chi, x, _config(1), reference=maximally_mixed(rho.layout))
    assert far.protocol.output_distance == pytest.approx(1.5)
    assert far.protocol.output_within_delta is False
    assert far.protocol.transcript()["output_closeness"]["within"] is False


def test_protocol_records_output_closeness():
    x = pauli_twirl_extractor(2)
    rho = _bell_pair()
    result = run_protocol(honest_prover_state(rho, x, 2).state, x, _config(2), reference=rho)
    assert result.output_distance <= 0.05
    assert result.output_within_delta is True
    closeness = result.transcript()["output_closeness"]
    assert closeness["delta"] == pytest.approx(0.1)
    assert closeness["within"] is True

    with pytest.raises(LayoutError):
        run_protocol(honest_prover_state(rho, x, 2).state, x, _config(2), reference=maximally_mixed(A1))


def test_extractor_adds_at_most_its_seed_length_of_entropy(rng):
    layout = RegisterLayout([("A", 3)])
    extractors = [make_extractor(3, 1, seed=5, battery=5), make_extractor(3, 2, seed=6, battery=5)]
    for _ in range(20):
        rho = random_density_matrix(layout, rng, rank=int(rng.integers(1, 4)))
        for x in extractors:
            assert vn_entropy(apply_extractor(x, rho)) <= vn_entropy(rho) + x.d + 1e-9
    twirl = pauli_twirl_extractor(1)
    for _ in range(20):
        rho = random_density_matrix(A1, rng, rank=1)
        assert vn_entropy(apply_extractor(twirl, rho)) <= vn_entropy(rho) + twirl.d + 1e-9


def test_average_output_carries_a_share_of_the_entropy(rng):
    x = pauli_twirl_extractor(2)
    layout = protocol_layout(1, 1, 2, 4)
    checked = 0
    for _ in range(50):
        chi = random_promise_state(layout, rng, mixture=int(rng.integers(1, 4)))
        result = run_protocol(chi, x, _config(2))
        if result.average_output is None:
            continue
        single = vn_entropy(partial_trace(result.average_output, "A"))
        assert single >= result.entropy / 2 - 1e-9
        checked += 1
    assert checked > 0


@pytest.mark.parametrize("q", [1, 2])
def test_honest_acceptance_beats_every_cheat_by_the_gap(rng, q):
    x = pauli_twirl_extractor(q)
    cfg = _config(q)
    layout = protocol_layout(1, 1, q, x.d)
    honest = run_protocol(honest_prover_state(_bell_pair(), x, q).state, x, cfg).accept_probability
    best_cheat = max(
        run_protocol(random_promise_state(layout, rng), x, cfg).accept_probability for _ in range(200)
    )
    assert honest - best_cheat >= cfg.c - cfg.s


def test_acceptance_matches_the_dense_measurement(rng):
    x = pauli_twirl_extractor(1)
    layout = protocol_layout(1, 1, 1, x.d)
    dilation = extractor_dilation(x).reshape(2, 4, 2, 4)
    full = np.einsum("xyuv,bc->xbyucv", dilation, np.eye(2)).reshape(16, 16)
    accept_projector = np.kron(np.eye(4), np.diag([1.0, 0.0, 0.0, 0.0]))
    states = [honest_prover_state(_bell_pair(), x, 1).state, misaligned_state(layout)]
    states += [random_promise_state(layout, rng, mixture=2) for _ in range(10)]
    for chi in states:
        dense = np.trace(accept_projector @ full.conj().T @ chi.matrix @ full).real
        assert run_protocol(chi, x, _config(1)).accept_probability == pytest.approx(dense, abs=1e-10)
