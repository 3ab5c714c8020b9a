from typing import NamedTuple

import numpy as np
import structlog

from hamiltonian import LN2, LocalHamiltonian, operator_norm, sampled_energy_estimate
from qstate import DensityMatrix, partial_trace
from qstate.errors import LayoutError

from ._config import ProtocolConfig
from ._extractor import Extractor
from ._protocol import ProtocolResult, run_protocol

log = structlog.get_logger(__name__)


class VerifierOutcome(NamedTuple):
    accept: bool
    statistic: float
    energy: float
    protocol: ProtocolResult


def verifier_delta(hamiltonian: LocalHamiltonian, low: float, high: float) -> float:
    """(high − low)/(4‖H‖∞), the closeness asked of the entropy protocol."""
    norm = operator_norm(hamiltonian)
    return float((high - low) / (4.0 * norm)) if norm > 0 else float(high - low)


def _output_on(hamiltonian: LocalHamiltonian, result: ProtocolResult) -> DensityMatrix:
    average = result.average_output
    reduced = partial_trace(average, "A")
    if reduced.dim != hamiltonian.layout.dim:
        raise LayoutError(f"Protocol output of dimension {reduced.dim} for H on {hamiltonian.layout}")
    return reduced.relabel(hamiltonian.layout)


def run_fea_protocol(
    hamiltonian: LocalHamiltonian,
    beta: float,
    a: float,
    b: float,
    claimed_entropy: float,
    chi: DensityMatrix,
    x: Extractor,
    cfg: ProtocolConfig,
    samples: int = 0,
    rng_seed: int | np.random.Generator | None = None,
    reference: DensityMatrix | None = None,
) -> VerifierOutcome:
    """
    Free-energy verifier.

    Runs the entropy protocol with τ = S̃ and estimates the energy of the
    average output σ̃_A; accepts iff the protocol accepts and
    F̃ = Ẽ − S̃ ln 2/β < (a+b)/2.

    Parameters:
    - hamiltonian (LocalHamiltonian): H on the n_A verified qubits.
    - beta (float): inverse temperature.
    - a, b (float): free-energy thresholds, a < b.
    - claimed_entropy (float): S̃ in bits.
    - chi: the prover's state.
    - x (Extractor), cfg (ProtocolConfig): protocol ingredients; cfg.tau is replaced by S̃
      and cfg.delta by (b − a)/(4‖H‖∞).
    - samples (int): energy measurements, 0 for the exact value.
    - rng_seed: seed for the energy sampling.
    - reference (DensityMatrix, optional): the state σ̃ is measured against, on A[, B].

    Returns:
    - VerifierOutcome: verdict, F̃, Ẽ and the protocol result.
    """
    cfg = cfg.model_copy(update={"tau": claimed_entropy, "delta": verifier_delta(hamiltonian, a, b)})
    result = run_protocol(chi, x, cfg, reference)
    if result.average_output is None:
        return VerifierOutcome(False, float("inf"), float("nan"), result)

    estimate = sampled_energy_estimate(hamiltonian, _output_on(hamiltonian, result), samples, rng_seed)
    free = estimate - claimed_entropy * LN2 / beta
    accept = result.accepted and free < (a + b) / 2
    log.info("free energy verifier", accept=accept, free_energy=free, accept_probability=result.accept_probability)
    return VerifierOutcome(accept, float(free), float(estimate), result)


def run_heles_protocol(
    hamiltonian: LocalHamiltonian,
    tau: float,
    alpha: float,
    beta: float,
    chi: DensityMatrix,
    x: Extractor,
    cfg: ProtocolConfig,
    samples: int = 0,
    rng_seed: int | np.random.Generator | None = None,
    reference: DensityMatrix | None = None,
) -> VerifierOutcome:
    """
    High-entropy low-energy verifier.

    Runs the entropy protocol with target τ and δ = (β − α)/(4‖H‖∞), and
    accepts iff it accepts and the energy estimate of σ̃_A is below (α+β)/2.

    Returns:
    - VerifierOutcome: verdict, Ẽ as the statistic, Ẽ and the protocol result.
    """
    cfg = cfg.model_copy(update={"tau": tau, "delta": verifier_delta(hamiltonian, alpha, beta)})
    result = run_protocol(chi, x, cfg, reference)
    if result.average_output is None:
        return VerifierOutcome(False, float("inf"), float("nan"), result)

    estimate = sampled_energy_estimate(hamiltonian, _output_on(hamiltonian, result), samples, rng_seed)
    accept = result.accepted and estimate < (alpha + beta) / 2
    log.info("entropy-energy verifier", accept=accept, energy=estimate, accept_probability=result.accept_probability)
    return VerifierOutcome(accept, float(estimate), float(estimate), result)
