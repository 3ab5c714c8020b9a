from functools import singledispatch

import numpy as np
import structlog
from scipy import sparse

from channels import ChannelSpec, apply_channel, dilation_unitary, with_purified_input
from hamiltonian import energy, free_energy, free_energy_functional, gibbs_state, log_partition_function
from qstate import (
    MAX_DENSE_QUBITS,
    DensityMatrix,
    PureState,
    RegisterLayout,
    embed_operator,
    maximally_mixed,
    trace_norm_distance,
    vn_entropy,
)
from qstate.errors import BudgetExceededError, InvalidInstanceError

from ._instances import (
    CIMMInstance,
    Decision,
    FEAInstance,
    HELESInstance,
    LEAPSInstance,
    LELESInstance,
    MaxOutQEAInstance,
    OptimizerReport,
    PPIOInstance,
    SeparableInstance,
    Verdict,
)
from ._optimize import (
    DEFAULT_RESTARTS,
    OBJECTIVE_TOL,
    LowEnergyOptimum,
    Objective,
    minimize_product_energy,
    objective_value,
    optimize_isometry_output,
    optimize_low_energy,
    product_distance,
)

log = structlog.get_logger(__name__)

# Energy slack allowed when a witness is re-verified
ENERGY_SLACK = 1e-8


def child_seeds(seed: int | None, count: int) -> list[int | None]:
    """Independent integer seeds derived from one root seed."""
    if seed is None:
        return [None] * count
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _optimum(hamiltonian, cutoff, objective, cut, restarts, seed, threads) -> LowEnergyOptimum | None:
    """The optimum at `cutoff`, None when no state has energy ≤ cutoff."""
    try:
        return optimize_low_energy(hamiltonian, cutoff, objective, cut, restarts, seed, threads)
    except InvalidInstanceError:
        log.debug("empty low-energy space", cutoff=cutoff)
        return None


def _threshold_decision(
    hamiltonian,
    alpha: float,
    beta: float,
    cut: tuple[str, ...],
    objective: Objective,
    yes,
    no,
    restarts: int,
    seed: int | None,
    threads: int,
) -> Verdict:
    """
    Shared body of the low-energy deciders.

    `yes(value)` is tested on the optimum at energy ≤ α and `no(value)` on
    the optimum at energy ≤ β; the first one that holds decides.
    """
    low_seed, high_seed = child_seeds(seed, 2)
    low = _optimum(hamiltonian, alpha, objective, cut, restarts, low_seed, threads)
    if low is not None and yes(low.value):
        return Verdict(Decision.YES, low.value, low.state, low.energy, low.report, {"cutoff": alpha})

    high = _optimum(hamiltonian, beta, objective, cut, restarts, high_seed, threads)
    reports = [r.report for r in (low, high) if r is not None]
    report = OptimizerReport.merge(*reports) if reports else None
    details = {"value_at_alpha": None if low is None else low.value}
    if high is None:
        return Verdict(Decision.NO, float("nan"), report=report, details={**details, "empty_at_beta": True})
    details["value_at_beta"] = high.value
    decision = Decision.NO if no(high.value) else Decision.UNDECIDED
    return Verdict(decision, high.value, report=report, details=details)


def decide_heles(
    inst: HELESInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """
    YES when some state with energy ≤ α reaches S(ψ_cut) ≥ s, NO when the
    largest entropy at energy ≤ β is ≤ t, UNDECIDED otherwise.
    """
    verdict = _threshold_decision(
        inst.hamiltonian,
        inst.alpha,
        inst.beta,
        inst.cut,
        Objective.MAX_ENTROPY,
        lambda value: value >= inst.s - OBJECTIVE_TOL,
        lambda value: value <= inst.t + OBJECTIVE_TOL,
        restarts,
        seed,
        threads,
    )
    log.info("heles decided", decision=verdict.decision.value, value=verdict.value, s=inst.s, t=inst.t)
    return verdict


def decide_leles(
    inst: LELESInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """
    YES when some state with energy ≤ α has S(ψ_cut) ≤ t, NO when the
    smallest entropy at energy ≤ β is ≥ s, UNDECIDED otherwise.
    """
    verdict = _threshold_decision(
        inst.hamiltonian,
        inst.alpha,
        inst.beta,
        inst.cut,
        Objective.MIN_ENTROPY,
        lambda value: value <= inst.t + OBJECTIVE_TOL,
        lambda value: value >= inst.s - OBJECTIVE_TOL,
        restarts,
        seed,
        threads,
    )
    log.info("leles decided", decision=verdict.decision.value, value=verdict.value, s=inst.s, t=inst.t)
    return verdict


def decide_leaps(
    inst: LEAPSInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """
    YES when some state with energy ≤ α is within a of a product state, NO
    when every state with energy ≤ β is at least b away, UNDECIDED otherwise.

    The distance of a fixed ψ to the nearest product state is 2√(1 − λ₁²).
    """
    verdict = _threshold_decision(
        inst.hamiltonian,
        inst.alpha,
        inst.beta,
        inst.cut,
        Objective.MIN_PRODUCT_DISTANCE,
        lambda value: value <= inst.a + OBJECTIVE_TOL,
        lambda value: value >= inst.b - OBJECTIVE_TOL,
        restarts,
        seed,
        threads,
    )
    log.info("leaps decided", decision=verdict.decision.value, value=verdict.value, a=inst.a, b=inst.b)
    return verdict


def decide_fea_exact(inst: FEAInstance) -> Verdict:
    """
    F = −(1/β) ln Z from a dense eigensolve; YES iff F ≤ a, NO iff F ≥ b.

    YES verdicts carry the Gibbs state, whose free-energy functional equals F.
    """
    layout = inst.hamiltonian.layout
    if layout.dim > 2**MAX_DENSE_QUBITS:
        raise BudgetExceededError(f"Exact free energy on dimension {layout.dim} exceeds 2^{MAX_DENSE_QUBITS}")

    value = free_energy(inst.hamiltonian, inst.beta)
    details = {"log_partition_function": log_partition_function(inst.hamiltonian, inst.beta)}
    if value <= inst.a:
        rho = gibbs_state(inst.hamiltonian, inst.beta)
        verdict = Verdict(Decision.YES, value, rho, energy(inst.hamiltonian, rho), details=details)
    elif value >= inst.b:
        verdict = Verdict(Decision.NO, value, details=details)
    else:
        verdict = Verdict(Decision.UNDECIDED, value, details=details)
    log.info("fea decided", decision=verdict.decision.value, free_energy=value, a=inst.a, b=inst.b)
    return verdict


def decide_separable(
    inst: SeparableInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """YES iff the smallest product-state energy is ≤ α, NO iff it is ≥ β."""
    state, value, report = minimize_product_energy(inst.hamiltonian, inst.cut, restarts, seed, threads)
    if value <= inst.alpha + ENERGY_SLACK:
        return Verdict(Decision.YES, value, state, value, report)
    decision = Decision.NO if value >= inst.beta - ENERGY_SLACK else Decision.UNDECIDED
    return Verdict(decision, value, energy=value, report=report)


def ppio_isometry(circuit: ChannelSpec) -> tuple[np.ndarray, RegisterLayout]:
    """
    The isometry ψ ↦ U(ψ ⊗ |0⟩_B) of a circuit that never touches E.

    Returns:
    - tuple: (matrix with one column per input basis state, output layout A, B)
    """
    layout = circuit.layout.subset(["A", "B"])
    n = layout.total_qubits
    total = sparse.identity(2**n, dtype=complex, format="csr")
    for step in circuit.steps:
        total = embed_operator(step.unitary, [2] * n, step.support) @ total
    inputs = [x << circuit.n_b for x in range(2**circuit.n_a)]
    return total[:, inputs].toarray(), layout


def ppio_output(circuit: ChannelSpec, psi: PureState) -> PureState:
    isometry, layout = ppio_isometry(circuit)
    return PureState(layout, isometry @ psi.amplitudes, validate=False)


def decide_ppio(
    inst: PPIOInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """
    Smallest distance of an isometry output to a product across A | B.

    YES verdicts carry the input state on A.
    """
    isometry, layout = ppio_isometry(inst.circuit)
    c, output, value, report = optimize_isometry_output(
        isometry, layout, ("A",), Objective.MIN_PRODUCT_DISTANCE, restarts, seed, threads
    )
    if value <= inst.a + OBJECTIVE_TOL:
        witness = PureState(RegisterLayout([("A", inst.circuit.n_a)]), c, validate=False)
        verdict = Verdict(Decision.YES, value, witness, report=report)
    else:
        decision = Decision.NO if value >= inst.b - OBJECTIVE_TOL else Decision.UNDECIDED
        verdict = Verdict(decision, value, report=report)
    log.info("ppio decided", decision=verdict.decision.value, distance=value)
    return verdict


def _purified_isometry(channel: ChannelSpec) -> tuple[np.ndarray, RegisterLayout, int]:
    """Dilation columns of the purified-input channel with B and E starting in |0⟩."""
    purified = with_purified_input(channel)
    layout = purified.layout
    zeros = layout.total_qubits - purified.n_a
    unitary = dilation_unitary(purified)
    inputs = [x << zeros for x in range(2**purified.n_a)]
    return unitary[:, inputs], layout, purified.n_a


def _input_marginal(amplitudes: np.ndarray, n_a: int) -> DensityMatrix:
    """Tr_ref |ψ⟩⟨ψ| for a purified input whose reference qubits come last."""
    matrix = amplitudes.reshape(2**n_a, -1)
    return DensityMatrix(RegisterLayout([("A", n_a)]), matrix @ matrix.conj().T, validate=False)


def _channel_search(channel: ChannelSpec, objective: Objective, restarts, seed, threads):
    isometry, layout, _ = _purified_isometry(channel)
    c, _, value, report = optimize_isometry_output(isometry, layout, ("B",), objective, restarts, seed, threads)
    return _input_marginal(c, channel.n_a), value, report


def decide_maxoutqea(
    inst: MaxOutQEAInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """
    Largest output entropy S(Φ(ρ)) over mixed inputs ρ, searched through
    pure inputs of the purified-input channel.

    YES iff it reaches τ + 1, NO iff it is ≤ τ − 1.
    """
    rho, value, report = _channel_search(inst.channel, Objective.MAX_ENTROPY, restarts, seed, threads)
    if value >= inst.tau + 1 - OBJECTIVE_TOL:
        verdict = Verdict(Decision.YES, value, rho, report=report)
    else:
        decision = Decision.NO if value <= inst.tau - 1 + OBJECTIVE_TOL else Decision.UNDECIDED
        verdict = Verdict(decision, value, report=report)
    log.info("maxoutqea decided", decision=verdict.decision.value, entropy=value, tau=inst.tau)
    return verdict


def check_cimm(inst: CIMMInstance, rho: DensityMatrix) -> tuple[float, Decision]:
    """
    ‖Φ(ρ) − Ĩ‖₁ for one input and what it says about the instance.

    Returns:
    - tuple: (distance, YES if ≤ a, NO if ≥ b, UNDECIDED in between)
    """
    output = apply_channel(inst.channel, rho)
    distance = trace_norm_distance(output, maximally_mixed(output.layout))
    if distance <= inst.a:
        return distance, Decision.YES
    return distance, Decision.NO if distance >= inst.b else Decision.UNDECIDED


def decide_cimm(
    inst: CIMMInstance, restarts: int = DEFAULT_RESTARTS, seed: int | None = None, threads: int = 1
) -> Verdict:
    """Smallest ‖Φ(ρ) − Ĩ‖₁ over inputs; YES iff ≤ a, NO iff ≥ b."""
    rho, value, report = _channel_search(inst.channel, Objective.MIN_MIXED_DISTANCE, restarts, seed, threads)
    if value <= inst.a + OBJECTIVE_TOL:
        verdict = Verdict(Decision.YES, value, rho, report=report)
    else:
        decision = Decision.NO if value >= inst.b - OBJECTIVE_TOL else Decision.UNDECIDED
        verdict = Verdict(decision, value, report=report)
    log.info("cimm decided", decision=verdict.decision.value, distance=value)
    return verdict


@singledispatch
def verify_witness(inst, verdict: Verdict) -> bool:
    """
    Re-check a YES verdict's witness against the instance thresholds.

    Energies get ENERGY_SLACK and entropies or distances OBJECTIVE_TOL.
    """
    raise TypeError(f"No witness check for {type(inst).__name__}")


def _low_energy(inst, witness) -> bool:
    return energy(inst.hamiltonian, witness) <= inst.alpha + ENERGY_SLACK


@verify_witness.register
def _(inst: HELESInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and _low_energy(inst, w) and (
        objective_value(w, inst.cut, Objective.MAX_ENTROPY) >= inst.s - OBJECTIVE_TOL
    )


@verify_witness.register
def _(inst: LELESInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and _low_energy(inst, w) and (
        objective_value(w, inst.cut, Objective.MIN_ENTROPY) <= inst.t + OBJECTIVE_TOL
    )


@verify_witness.register
def _(inst: LEAPSInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and _low_energy(inst, w) and product_distance(w, inst.cut) <= inst.a + OBJECTIVE_TOL


@verify_witness.register
def _(inst: FEAInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and free_energy_functional(inst.hamiltonian, w, inst.beta) <= inst.a + ENERGY_SLACK


@verify_witness.register
def _(inst: SeparableInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and _low_energy(inst, w) and product_distance(w, inst.cut) <= OBJECTIVE_TOL


@verify_witness.register
def _(inst: PPIOInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    if w is None:
        return False
    return product_distance(ppio_output(inst.circuit, w), ("A",)) <= inst.a + OBJECTIVE_TOL


@verify_witness.register
def _(inst: MaxOutQEAInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and vn_entropy(apply_channel(inst.channel, w)) >= inst.tau + 1 - OBJECTIVE_TOL


@verify_witness.register
def _(inst: CIMMInstance, verdict: Verdict) -> bool:
    w = verdict.witness
    return w is not None and check_cimm(inst, w)[0] <= inst.a + OBJECTIVE_TOL
