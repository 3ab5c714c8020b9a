import numpy as np
import pytest
from numpy.testing import assert_allclose

from qstate import (
    HADAMARD,
    DensityMatrix,
    PureState,
    RegisterLayout,
    align_purification,
    apply_operator,
    basis_state,
    bell_state,
    embed_operator,
    evolve,
    fannes_bound,
    fidelity,
    maximally_entangled_state,
    maximally_mixed,
    min_entropy,
    partial_trace,
    post_measure,
    pure_state_distance,
    purify,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    read_json,
    schmidt,
    schmidt_coefficients,
    shannon_entropy,
    state_from_document,
    state_to_document,
    swap_test_circuit_prob,
    swap_test_prob,
    tensor,
    trace_norm_distance,
    vn_entropy,
)
from qstate.errors import InvalidStateError, LayoutError, MalformedInputError, ZeroProbabilityError

SLACK = 1e-9
AB = RegisterLayout([("A", 1), ("B", 1)])


def test_layout_resolves_registers_in_layout_order():
    layout = RegisterLayout([("A", 1), ("B", 2), ("E", 3)])
    assert layout.dim == 64
    assert layout.resolve(["E", "A"]) == ("A", "E")
    assert layout.complement("B") == ("A", "E")
    assert layout.qubit_indices("B") == [1, 2]


def test_layout_rejects_duplicates_and_unknown_registers():
    with pytest.raises(LayoutError):
        RegisterLayout([("A", 1), ("A", 2)])
    with pytest.raises(LayoutError):
        RegisterLayout([("C", 2, 5)])
    with pytest.raises(LayoutError):
        AB.register("Z")


def test_compressed_register_keeps_its_dimension_in_documents():
    layout = RegisterLayout([("A", 1), ("C", 3, 5)])
    assert layout.dim == 10
    assert layout.to_pairs() == [["A", 1], ["C", 3, 5]]
    psi = PureState.normalized(layout, np.arange(10) + 1.0)
    back = state_from_document(state_to_document(psi))
    assert back.layout == layout
    assert_allclose(back.amplitudes, psi.amplitudes)


def test_states_validate_norm_and_positivity():
    with pytest.raises(InvalidStateError):
        PureState(AB, [1, 1, 0, 0])
    with pytest.raises(InvalidStateError):
        DensityMatrix(AB, np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(LayoutError):
        PureState(AB, [1, 0])


def test_bell_state_marginal_is_maximally_mixed():
    rho_a = partial_trace(bell_state(), "A")
    assert_allclose(rho_a.matrix, np.eye(2) / 2, atol=1e-12)
    assert vn_entropy(rho_a) == pytest.approx(1.0)
    assert min_entropy(rho_a) == pytest.approx(1.0)


def test_partial_trace_of_product_returns_factors(rng):
    a = random_density_matrix(RegisterLayout([("A", 1)]), rng)
    b = random_density_matrix(RegisterLayout([("B", 2)]), rng)
    joint = tensor(a, b)
    assert_allclose(partial_trace(joint, "A").matrix, a.matrix, atol=1e-12)
    assert_allclose(partial_trace(joint, "B").matrix, b.matrix, atol=1e-12)


def test_local_operator_matches_kronecker_embedding(rng):
    layout = RegisterLayout([("A", 1), ("B", 1), ("E", 1)])
    psi = random_pure_state(layout, rng)
    u = random_unitary(4, rng)
    full = embed_operator(u, [2, 2, 2], [0, 2]).toarray()
    assert_allclose(apply_operator(psi, u, qubits=[0, 2]), full @ psi.amplitudes, atol=1e-12)
    assert_allclose(full @ full.conj().T, np.eye(8), atol=1e-12)


def test_evolve_density_matches_vector(rng):
    psi = random_pure_state(AB, rng)
    u = random_unitary(2, rng)
    vector = evolve(psi, u, registers=["B"])
    matrix = evolve(psi.density(), u, registers=["B"])
    assert_allclose(matrix.matrix, vector.density().matrix, atol=1e-12)


def test_schmidt_decomposition_reconstructs_state(rng):
    layout = RegisterLayout([("A", 1), ("B", 2)])
    psi = random_pure_state(layout, rng)
    terms = schmidt(psi, "A")
    rebuilt = sum(t.coefficient * np.kron(t.left.amplitudes, t.right.amplitudes) for t in terms)
    assert_allclose(rebuilt, psi.amplitudes, atol=1e-12)
    coefficients = schmidt_coefficients(psi, "A")
    assert np.sum(coefficients**2) == pytest.approx(1.0)
    assert np.all(np.diff(coefficients) <= 1e-15)


def test_trivial_cut_is_rejected():
    with pytest.raises(LayoutError):
        schmidt_coefficients(bell_state(), ["A", "B"])


def test_purification_reproduces_state_and_aligns(rng):
    rho = random_density_matrix(RegisterLayout([("A", 1)]), rng)
    phi = purify(rho, "R")
    assert_allclose(partial_trace(phi, "A").matrix, rho.matrix, atol=1e-12)

    # A second purification differs by a unitary on R only
    other = evolve(phi, random_unitary(2, rng), registers=["R"])
    u = align_purification(other, phi, "R")
    aligned = evolve(other, u, registers=["R"])
    assert abs(np.vdot(phi.amplitudes, aligned.amplitudes)) == pytest.approx(1.0, abs=1e-10)


def test_pure_distances_agree_with_density_distances(rng):
    psi = random_pure_state(AB, rng)
    phi = random_pure_state(AB, rng)
    full = trace_norm_distance(psi.density(), phi.density())
    assert trace_norm_distance(psi, phi) == pytest.approx(full, abs=1e-10)
    assert pure_state_distance(psi, phi) == pytest.approx(full / 2, abs=1e-10)
    assert fidelity(psi, phi.density()) == pytest.approx(fidelity(psi, phi), abs=1e-10)


def test_swap_test_formula_matches_circuit(rng):
    layout = RegisterLayout([("A", 2)])
    for _ in range(100):
        psi = random_pure_state(layout, rng)
        phi = random_pure_state(layout, rng)
        assert swap_test_circuit_prob(psi, phi) == pytest.approx(swap_test_prob(psi, phi), abs=1e-10)


def test_swap_test_accepts_three_quarters_at_half_overlap():
    layout = RegisterLayout([("A", 1)])
    zero = basis_state(layout, 0)
    plus = PureState(layout, HADAMARD @ zero.amplitudes)
    assert swap_test_prob(zero, plus) == pytest.approx(0.75)
    assert swap_test_circuit_prob(zero, plus) == pytest.approx(0.75)


def test_fannes_bound_edges():
    eta = 1 / (np.e * np.log(2))
    assert fannes_bound(0.0, 4) == 0.0
    assert fannes_bound(1.0, 2) == pytest.approx(1.0)
    assert fannes_bound(2.0, 4) == pytest.approx(4.0 + eta)
    assert fannes_bound(0.1, 2) < fannes_bound(0.2, 2)


@pytest.mark.parametrize(
    "distance, dim, expected",
    [
        (0.8, 2, 1.0575),
        (0.5, 4, 1.5),
        (1.5, 4, 3.0 + 1 / (np.e * np.log(2))),
    ],
)
def test_fannes_bound_is_not_capped_at_log_dimension(distance, dim, expected):
    assert fannes_bound(distance, dim) == pytest.approx(expected, abs=1e-4)


def test_fannes_bound_holds_past_unit_distance_on_a_qubit():
    layout = RegisterLayout([("A", 1)])
    rho = DensityMatrix(layout, np.diag([1.0, 0.0]))
    sigma = DensityMatrix(layout, np.diag([0.25, 0.75]))
    distance = trace_norm_distance(rho, sigma)
    assert distance == pytest.approx(1.5)
    assert vn_entropy(sigma) - vn_entropy(rho) <= fannes_bound(distance, 2)


def test_post_measure_rejects_impossible_outcome():
    with pytest.raises(ZeroProbabilityError):
        post_measure(basis_state(AB, 0), np.diag([0, 1, 1, 1]))


def test_read_json_reports_bad_syntax(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(MalformedInputError):
        read_json(path)
    with pytest.raises(MalformedInputError):
        state_from_document({"registers": [["A", 1]]})


def _random_effect(rng, dim):
    v = random_unitary(dim, rng)
    return (v * rng.random(dim)) @ v.conj().T


def test_entropy_inequality_battery(rng):
    """Standard entropy and distance inequalities on 1000 random two-qubit instances."""
    single = RegisterLayout([("A", 1)])
    for _ in range(1000):
        rank = int(rng.integers(1, 5))
        rho = random_density_matrix(AB, rng, rank=rank)
        sigma = random_density_matrix(AB, rng)
        rho_a, rho_b = partial_trace(rho, "A"), partial_trace(rho, "B")

        assert vn_entropy(rho) >= min_entropy(rho) - SLACK
        assert vn_entropy(rho) <= vn_entropy(rho_a) + vn_entropy(rho_b) + SLACK

        p = rng.random()
        mixture = DensityMatrix(AB, p * rho.matrix + (1 - p) * sigma.matrix, validate=False)
        assert vn_entropy(mixture) >= p * vn_entropy(rho) + (1 - p) * vn_entropy(sigma) - SLACK

        distance = trace_norm_distance(rho, sigma)
        assert abs(vn_entropy(rho) - vn_entropy(sigma)) <= fannes_bound(distance, AB.dim) + SLACK

        f = fidelity(rho, sigma)
        assert 1 - np.sqrt(f) <= distance / 2 + SLACK
        assert distance / 2 <= np.sqrt(1 - f) + SLACK

        effect = _random_effect(rng, AB.dim)
        try:
            prob, post = post_measure(rho, effect)
        except ZeroProbabilityError:
            continue
        assert trace_norm_distance(rho, post) <= 2 * np.sqrt(max(0.0, 1 - prob)) + SLACK

        # Holevo: computational-basis information never exceeds χ
        states = [random_density_matrix(single, rng) for _ in range(2)]
        q = rng.dirichlet([1.0, 1.0])
        average = DensityMatrix(single, sum(w * s.matrix for w, s in zip(q, states)), validate=False)
        chi = vn_entropy(average) - sum(w * vn_entropy(s) for w, s in zip(q, states))
        joint = np.array([w * np.diag(s.matrix).real for w, s in zip(q, states)])
        info = shannon_entropy(q) + shannon_entropy(joint.sum(axis=0)) - shannon_entropy(joint.ravel())
        assert info <= chi + SLACK


def test_maximally_entangled_state_has_maximal_marginal():
    left = RegisterLayout([("A", 2)])
    right = RegisterLayout([("R", 2)])
    psi = maximally_entangled_state(left, right)
    assert_allclose(partial_trace(psi, "A").matrix, maximally_mixed(left).matrix, atol=1e-12)
