from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import structlog
from scipy.linalg import polar

from qstate import (
    ATOL,
    EIGEN_CLAMP,
    MAX_DENSE_QUBITS,
    ZERO_PROBABILITY,
    DensityMatrix,
    PureState,
    RegisterLayout,
    basis_state,
    evolve,
    maximally_mixed,
    partial_trace,
    post_measure,
    purify,
    random_unitary,
    reduce_sites,
    tensor,
    trace_norm_distance,
    vn_entropy,
)
from qstate.errors import BudgetExceededError, LayoutError, PromiseViolationError

from ._config import ProtocolConfig, certified_entropy_bound
from ._extractor import Extractor, extractor_dilation
from ._flatten import tensor_power

log = structlog.get_logger(__name__)

# χ_𝒜 may deviate from Ĩ by this much in trace norm
PROMISE_TOL = 1e-6

# Largest state (purifier included) used while aligning the honest prover's marginal
MAX_PURIFIED_QUBITS = 16


def protocol_layout(n_a: int, n_b: int, q: int, d: int) -> RegisterLayout:
    """Registers 𝒜 = A₁…A_q, ℬ = B₁…B_q (omitted when n_B = 0) and the d selector qubits E."""
    registers = [("A", q * n_a)]
    if n_b:
        registers.append(("B", q * n_b))
    registers.append(("E", d))
    return RegisterLayout(registers)


def _check_protocol_layout(layout: RegisterLayout, x: Extractor):
    if layout.names[0] != "A" or layout.names[-1] != "E" or not set(layout.names) <= {"A", "B", "E"}:
        raise LayoutError(f"Protocol states live on A[, B], E; got {layout}")
    if layout.register("A").qubits != x.n:
        raise LayoutError(f"Extractor on {x.n} qubits, 𝒜 has {layout.register('A').qubits}")
    if layout.register("E").qubits != x.d:
        raise LayoutError(f"Extractor needs {x.d} selector qubits, E has {layout.register('E').qubits}")


def _marginal_residual(chi: DensityMatrix) -> float:
    marginal = partial_trace(chi, "A")
    return trace_norm_distance(marginal, maximally_mixed(marginal.layout))


def align_marginal(chi: DensityMatrix) -> tuple[DensityMatrix, float]:
    """
    Closest state (by purification overlap) whose 𝒜 marginal is exactly Ĩ.

    χ is purified with a minimal purifier P; the purification's 𝒜 | rest
    matrix G is replaced by its polar isometry, which is the purification of
    Ĩ_𝒜 with maximal overlap, and P is traced out again.

    Returns:
    - tuple: (aligned state, squared purification overlap)
    """
    layout = chi.layout
    d_a = layout.register("A").dim
    rest = layout.dim // d_a
    rank = int(np.sum(chi.eigenvalues() > EIGEN_CLAMP))
    need = max(rank, -(-d_a // rest))
    p = int(np.ceil(np.log2(need))) if need > 1 else 0
    if layout.total_qubits + p > MAX_PURIFIED_QUBITS:
        raise BudgetExceededError(
            f"Aligning needs {layout.total_qubits + p} qubits, more than {MAX_PURIFIED_QUBITS}"
        )

    psi = purify(chi, "P", p)
    g = psi.amplitudes.reshape(d_a, -1).T
    isometry, _ = polar(g)
    target = PureState(psi.layout, (isometry.T / np.sqrt(d_a)).ravel(), validate=False)
    overlap = abs(np.vdot(psi.amplitudes, target.amplitudes)) ** 2
    return partial_trace(target, layout.names), float(min(1.0, overlap))


class HonestProverState(NamedTuple):
    state: DensityMatrix
    residual: float
    fidelity: float


def honest_prover_state(rho_ab: DensityMatrix, x: Extractor, q: int) -> HonestProverState:
    """
    The honest prover's message for q copies of ρ_AB.

    χ = (U_T ⊗ I_ℬ)(ρ_AB^{⊗q} ⊗ |0⟩⟨0|_E)(U_T† ⊗ I_ℬ), then aligned so that
    χ_𝒜 = Ĩ exactly.

    Parameters:
    - rho_ab (DensityMatrix): state on A or on A, B.
    - x (Extractor): extractor on q·n_A qubits.
    - q (int): copies.

    Returns:
    - HonestProverState: aligned χ, ‖χ_𝒜 − Ĩ‖₁ before alignment, and the
      squared purification overlap between χ and the aligned state.
    """
    names = rho_ab.layout.names
    if names not in (("A",), ("A", "B")):
        raise LayoutError(f"Prover input must live on A or A, B; got {rho_ab.layout}")
    n_a = rho_ab.layout.register("A").qubits
    n_b = rho_ab.layout.register("B").qubits if "B" in rho_ab.layout else 0
    if x.n != q * n_a:
        raise LayoutError(f"Extractor on {x.n} qubits for {q} copies of {n_a} qubits")
    layout = protocol_layout(n_a, n_b, q, x.d)
    if layout.total_qubits > MAX_DENSE_QUBITS:
        raise BudgetExceededError(f"Protocol state on {layout.total_qubits} qubits exceeds {MAX_DENSE_QUBITS}")

    selectors = basis_state(RegisterLayout([("E", x.d)])).density()
    chi = tensor(tensor_power(rho_ab, q), selectors)
    chi = evolve(chi, extractor_dilation(x), qubits=layout.qubit_indices("A") + layout.qubit_indices("E"))

    residual = _marginal_residual(chi)
    if residual <= EIGEN_CLAMP:
        return HonestProverState(chi, residual, 1.0)
    aligned, overlap = align_marginal(chi)
    log.debug("honest prover aligned", residual=residual, fidelity=overlap)
    return HonestProverState(aligned, residual, overlap)


def random_promise_state(
    layout: RegisterLayout, rng: np.random.Generator, mixture: int = 1
) -> DensityMatrix:
    """
    Random χ with χ_𝒜 = Ĩ: a mixture of states (1/√D) Σᵢ |i⟩_𝒜 ⊗ W|i⟩ with Haar isometries W.
    """
    d_a = layout.register("A").dim
    rest = layout.dim // d_a
    if rest < d_a:
        raise LayoutError(f"ℬE of dimension {rest} cannot purify Ĩ on dimension {d_a}")
    matrix = np.zeros((layout.dim, layout.dim), dtype=complex)
    for _ in range(mixture):
        w = random_unitary(rest, rng)[:, :d_a]
        vector = (w.T / np.sqrt(d_a)).ravel()
        matrix += np.outer(vector, vector.conj())
    return DensityMatrix(layout, matrix / mixture, validate=False)


def misaligned_state(layout: RegisterLayout) -> DensityMatrix:
    """Ĩ_𝒜 ⊗ |0⟩⟨0|_ℬ ⊗ |1…1⟩⟨1…1|_E, accepted with probability exactly 2^-d."""
    state = maximally_mixed(layout.subset("A"))
    for name in layout.names[1:]:
        register = layout.register(name)
        index = register.dim - 1 if name == "E" else 0
        state = tensor(state, basis_state(layout.subset(name), index).density())
    return state


def average_output(sigma: DensityMatrix, q: int) -> DensityMatrix:
    """σ̃_AB = (1/q) Σᵢ σ_{AᵢBᵢ} for a state on 𝒜[, ℬ]."""
    layout = sigma.layout
    n_a = layout.register("A").qubits // q
    n_b = layout.register("B").qubits // q if "B" in layout else 0
    sites = [2] * layout.total_qubits
    total = np.zeros((2 ** (n_a + n_b),) * 2, dtype=complex)
    for i in range(q):
        keep = list(range(i * n_a, (i + 1) * n_a))
        keep += [q * n_a + i * n_b + j for j in range(n_b)]
        total += reduce_sites(sigma.matrix, sites, keep)
    single = [("A", n_a)] + ([("B", n_b)] if n_b else [])
    return DensityMatrix(RegisterLayout(single), total / q, validate=False)


@dataclass(frozen=True)
class ProtocolResult:
    """
    Attributes:
        accept_probability: Tr(Π U_T† χ U_T).
        post_state: σ_𝒜ℬ on acceptance, None when acceptance is impossible.
        average_output: σ̃_AB, None with post_state.
        entropy: S(σ_𝒜) in bits.
        entropy_bound: q(τ − δ′).
        certified_bound: entropy an output accepted with probability ≥ s is guaranteed.
        config: the protocol parameters.
        output_distance: ‖σ̃ − ρ‖₁ against the reference state, when one was given.
    """

    accept_probability: float
    post_state: Optional[DensityMatrix]
    average_output: Optional[DensityMatrix]
    entropy: float
    entropy_bound: float
    certified_bound: float
    config: ProtocolConfig
    output_distance: Optional[float] = None

    @property
    def accepted(self) -> bool:
        return self.accept_probability >= self.config.s

    @property
    def certificate_holds(self) -> bool:
        """Acceptance with probability ≥ s implies S(σ_𝒜) ≥ q(τ − δ′)."""
        return not self.accepted or self.entropy >= self.entropy_bound - ATOL

    @property
    def output_within_delta(self) -> Optional[bool]:
        """‖σ̃ − ρ‖₁ ≤ δ, None without a reference or an output."""
        if self.output_distance is None:
            return None
        return self.output_distance <= self.config.delta + ATOL

    def transcript(self) -> dict:
        document = {
            "config": self.config.model_dump(),
            "accept_probability": self.accept_probability,
            "entropy_certificate": {"S_sigma": self.entropy, "bound": self.entropy_bound},
        }
        if self.output_distance is not None:
            document["output_closeness"] = {
                "distance": self.output_distance,
                "delta": self.config.delta,
                "within": self.output_within_delta,
            }
        return document


def run_protocol(
    chi: DensityMatrix,
    x: Extractor,
    cfg: ProtocolConfig,
    reference: Optional[DensityMatrix] = None,
) -> ProtocolResult:
    """
    Run the entropy verification protocol on a prover state.

    Undo the extractor dilation on 𝒜E, then measure Π = |0…0⟩⟨0…0|_E.
    With a reference ρ the average output σ̃ is compared to it against
    cfg.delta.

    Parameters:
    - chi (DensityMatrix): the prover's state on A, [B,] E with χ_𝒜 = Ĩ.
    - x (Extractor): the extractor on q·n_A qubits.
    - cfg (ProtocolConfig): protocol parameters.
    - reference (DensityMatrix, optional): the state the output should approximate, on A[, B].

    Returns:
    - ProtocolResult: acceptance probability, output state and entropy certificate.
    """
    layout = chi.layout
    _check_protocol_layout(layout, x)
    if layout.register("A").qubits != cfg.q * cfg.n_a:
        raise LayoutError(f"𝒜 has {layout.register('A').qubits} qubits, config needs {cfg.q * cfg.n_a}")

    violation = _marginal_residual(chi)
    if violation > PROMISE_TOL:
        log.warning("protocol promise violated", distance=violation)
        raise PromiseViolationError(f"‖χ_𝒜 − Ĩ‖₁ = {violation:.3e} exceeds {PROMISE_TOL}")

    qubits = layout.qubit_indices("A") + layout.qubit_indices("E")
    rotated = evolve(chi, extractor_dilation(x).conj().T, qubits=qubits)
    accept = float(partial_trace(rotated, "E").matrix[0, 0].real)

    keep = layout.complement("E")
    bound = cfg.q * (cfg.tau - cfg.delta_prime)
    certified = certified_entropy_bound(cfg.s, cfg.q, cfg.n_a, x.d)
    if accept <= ZERO_PROBABILITY:
        return ProtocolResult(0.0, None, None, 0.0, bound, certified, cfg)

    projector = np.zeros((2**x.d, 2**x.d))
    projector[0, 0] = 1.0
    _, post = post_measure(rotated, projector, registers=["E"])
    sigma = partial_trace(post, keep)
    entropy = vn_entropy(partial_trace(sigma, "A"))
    average = average_output(sigma, cfg.q)

    distance = None
    if reference is not None:
        if reference.layout != average.layout:
            raise LayoutError(f"Reference on {reference.layout}, the protocol output is on {average.layout}")
        distance = trace_norm_distance(average, reference)
        if distance > cfg.delta:
            log.warning("protocol output outside δ", distance=distance, delta=cfg.delta)
    log.debug("protocol run", accept=accept, entropy=entropy, bound=bound, output_distance=distance)
    return ProtocolResult(accept, sigma, average, entropy, bound, certified, cfg, distance)
