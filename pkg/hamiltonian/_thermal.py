import numpy as np
import structlog
from scipy.special import logsumexp

from qstate import DensityMatrix, PureState, vn_entropy

from ._spectrum import energy

log = structlog.get_logger(__name__)

# Converts entropies in bits to nats
LN2 = float(np.log(2.0))


def _eigh(hamiltonian):
    matrix = hamiltonian.sparse().toarray()
    return np.linalg.eigh((matrix + matrix.conj().T) / 2)


def _check_beta(beta: float, strict: bool):
    if not np.isfinite(beta) or beta < 0 or (strict and beta == 0):
        bound = "> 0" if strict else "≥ 0"
        raise ValueError(f"Inverse temperature must be finite and {bound}, got {beta}")


def log_partition_function(hamiltonian, beta: float) -> float:
    """ln Z = ln Σᵢ e^{−βλᵢ}, computed in the log domain."""
    _check_beta(beta, strict=False)
    w, _ = _eigh(hamiltonian)
    return float(logsumexp(-beta * w))


def partition_function(hamiltonian, beta: float) -> float:
    """
    Z = Tr e^{−βH}.

    Raises OverflowError when Z is not representable; use
    `log_partition_function` in that case.
    """
    log_z = log_partition_function(hamiltonian, beta)
    if log_z > np.log(np.finfo(float).max):
        log.warning("partition function overflows", log_z=log_z)
        raise OverflowError(f"Z = exp({log_z:.6g}) overflows; use log_partition_function")
    return float(np.exp(log_z))


def gibbs_state(hamiltonian, beta: float) -> DensityMatrix:
    """
    Thermal state e^{−βH}/Z from the eigendecomposition of H.

    Parameters:
    - hamiltonian: Hamiltonian exposing `layout` and `sparse()`.
    - beta (float): inverse temperature, ≥ 0.

    Returns:
    - DensityMatrix: the Gibbs state.
    """
    _check_beta(beta, strict=False)
    w, v = _eigh(hamiltonian)
    weights = np.exp(-beta * w - logsumexp(-beta * w))
    rho = (v * weights) @ v.conj().T
    return DensityMatrix(hamiltonian.layout, (rho + rho.conj().T) / 2, validate=False)


def free_energy(hamiltonian, beta: float) -> float:
    """F = −(1/β) ln Z in the energy units of H."""
    _check_beta(beta, strict=True)
    return -log_partition_function(hamiltonian, beta) / beta


def free_energy_functional(hamiltonian, state: PureState | DensityMatrix, beta: float) -> float:
    """f(ρ) = Tr(Hρ) − S(ρ)/β with S in nats; minimised by the Gibbs state."""
    _check_beta(beta, strict=True)
    return energy(hamiltonian, state) - vn_entropy(state) * LN2 / beta
