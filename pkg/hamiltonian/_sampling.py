import numpy as np
import structlog

from qstate import DensityMatrix, PureState, reduce_sites
from qstate.errors import LayoutError

from ._spectrum import energy
from ._terms import LocalHamiltonian

log = structlog.get_logger(__name__)


def _local_state(hamiltonian: LocalHamiltonian, state, support) -> np.ndarray:
    data = state.amplitudes if isinstance(state, PureState) else state.matrix
    return reduce_sites(data, [2] * hamiltonian.n_qubits, support)


def term_expectations(hamiltonian: LocalHamiltonian, state: PureState | DensityMatrix) -> np.ndarray:
    """Tr(Hⱼρ) for every term."""
    if state.layout != hamiltonian.layout:
        raise LayoutError(f"State on {state.layout} but Hamiltonian on {hamiltonian.layout}")
    return np.array(
        [
            np.trace(term.dense() @ _local_state(hamiltonian, state, term.support)).real
            for term in hamiltonian.terms
        ]
    )


def _outcome_distribution(hamiltonian, state, term):
    """Eigenvalues of a term and the probabilities of measuring each of them."""
    values, vectors = np.linalg.eigh(term.dense())
    local = _local_state(hamiltonian, state, term.support)
    probs = np.einsum("ki,kl,li->i", vectors.conj(), local, vectors).real
    probs = np.clip(probs, 0.0, None)
    return values, probs / probs.sum()


def sampled_energy_estimate(
    hamiltonian: LocalHamiltonian,
    state: PureState | DensityMatrix,
    samples: int,
    rng_seed: int | np.random.Generator | None = None,
) -> float:
    """
    Unbiased estimate of Tr(Hρ) from random term measurements.

    Each sample picks a term Hⱼ uniformly at random, measures it in its
    eigenbasis and records the eigenvalue; the estimate is m times the
    sample mean. `samples = 0` returns Tr(Hρ) exactly.

    Args:
        hamiltonian: the local Hamiltonian.
        state: a state on the Hamiltonian's layout.
        samples: number of measurements, or 0 for the exact value.
        rng_seed: seed or generator driving the term choice and the outcomes.

    Returns:
        The energy estimate.
    """
    if samples < 0:
        raise ValueError(f"samples must be non-negative, got {samples}")
    if samples == 0:
        return energy(hamiltonian, state)
    if state.layout != hamiltonian.layout:
        raise LayoutError(f"State on {state.layout} but Hamiltonian on {hamiltonian.layout}")

    hamiltonian.norm_warnings()
    rng = np.random.default_rng(rng_seed)
    m = hamiltonian.n_terms

    chosen = rng.integers(m, size=samples)
    counts = np.bincount(chosen, minlength=m)

    total = 0.0
    for j, count in enumerate(counts):
        if count == 0:
            continue
        values, probs = _outcome_distribution(hamiltonian, state, hamiltonian.terms[j])
        total += float(rng.choice(values, size=count, p=probs).sum())

    estimate = m * total / samples
    log.debug("sampled energy", samples=samples, terms=m, estimate=estimate)
    return estimate
