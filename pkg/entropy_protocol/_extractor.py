from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np
import structlog
from scipy.linalg import hadamard

from hamiltonian import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z
from qstate import (
    MAX_DENSE_QUBITS,
    DensityMatrix,
    RegisterLayout,
    maximally_mixed,
    random_unitary,
    trace_norm_distance,
)
from qstate.errors import BudgetExceededError, LayoutError

log = structlog.get_logger(__name__)

# Largest extractor input and seed sizes generated by make_extractor
MAX_EXTRACTOR_QUBITS = 6
MAX_SEED_BITS = 10

DEFAULT_BATTERY = 100


@dataclass(frozen=True)
class Extractor:
    """
    A 2^d-regular channel T(ρ) = 2^-d Σᵢ Uᵢ ρ Uᵢ†.

    Attributes:
        n: input qubits.
        unitaries: the 2^d unitaries.
        k: min-entropy threshold in bits.
        epsilon: measured max ‖T(ρ) − Ĩ‖₁ over states with H∞(ρ) ≥ k.
        kind: "haar" or "pauli".
    """

    n: int
    unitaries: tuple[np.ndarray, ...]
    k: float
    epsilon: float
    kind: str = "haar"

    def __post_init__(self):
        count = len(self.unitaries)
        if count < 1 or count & (count - 1):
            raise LayoutError(f"An extractor needs a power-of-two number of unitaries, got {count}")
        for u in self.unitaries:
            if u.shape != (2**self.n, 2**self.n):
                raise LayoutError(f"Extractor unitary of shape {u.shape} on {self.n} qubits")

    @property
    def d(self) -> int:
        """Seed length, log₂ of the number of unitaries."""
        return len(self.unitaries).bit_length() - 1

    @property
    def dim(self) -> int:
        return 2**self.n


def apply_extractor(x: Extractor, rho: DensityMatrix) -> DensityMatrix:
    """T(ρ) on any layout of dimension 2^n."""
    if rho.dim != x.dim:
        raise LayoutError(f"Extractor on {x.n} qubits applied to {rho.layout}")
    out = sum(u @ rho.matrix @ u.conj().T for u in x.unitaries) / len(x.unitaries)
    return DensityMatrix(rho.layout, out, validate=False)


def high_min_entropy_state(n: int, k: float, rng: np.random.Generator) -> DensityMatrix:
    """
    Random n-qubit state with H∞ ≥ k.

    A Dirichlet spectrum is mixed with the uniform one until its largest
    eigenvalue is at most 2^-k, then rotated by a Haar unitary.
    """
    dim = 2**n
    if k > n:
        raise ValueError(f"No {n}-qubit state has min-entropy {k}")
    p = rng.dirichlet(np.full(dim, 0.5))
    ceiling = 2.0 ** (-k)
    top = p.max()
    if top > ceiling:
        mix = (top - ceiling) / (top - 1.0 / dim) if top > 1.0 / dim else 1.0
        p = (1 - mix) * p + mix / dim
    u = random_unitary(dim, rng)
    layout = RegisterLayout([("A", n)])
    return DensityMatrix(layout, (u * p) @ u.conj().T, validate=False)


def extractor_error(
    x: Extractor, k: float, rng: np.random.Generator, battery: int = DEFAULT_BATTERY
) -> float:
    """Max ‖T(ρ) − Ĩ‖₁ over a random battery of states with H∞(ρ) ≥ k."""
    layout = RegisterLayout([("A", x.n)])
    target = maximally_mixed(layout)
    worst = 0.0
    for _ in range(battery):
        rho = high_min_entropy_state(x.n, k, rng)
        worst = max(worst, trace_norm_distance(apply_extractor(x, rho), target))
    return worst


def pauli_strings(n: int) -> list[np.ndarray]:
    """All 4^n Pauli strings on n qubits."""
    paulis = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
    if n == 0:
        return [np.eye(1, dtype=complex)]
    return [reduce(np.kron, choice) for choice in product(paulis, repeat=n)]


def pauli_twirl_extractor(n: int) -> Extractor:
    """The full Pauli twirl, d = 2n; T(ρ) = Ĩ for every input."""
    return Extractor(n, tuple(pauli_strings(n)), k=0.0, epsilon=0.0, kind="pauli")


def make_extractor(
    n: int,
    d: int,
    seed: int | None = None,
    kind: str = "haar",
    k: float | None = None,
    battery: int = DEFAULT_BATTERY,
) -> Extractor:
    """
    Build an extractor and measure its accuracy.

    Parameters:
    - n (int): input qubits, at most MAX_EXTRACTOR_QUBITS.
    - d (int): seed length; 2^d unitaries.
    - seed (int, optional): random seed.
    - kind (str): "haar" for Haar-random unitaries, "pauli" for the Pauli twirl (needs d = 2n).
    - k (float, optional): min-entropy threshold; defaults to max(0, n − d/2).
    - battery (int): number of test states used to measure ε̂.

    Returns:
    - Extractor: with the measured ε̂ stored in `epsilon`.
    """
    if n < 0 or n > MAX_EXTRACTOR_QUBITS or d < 0 or d > MAX_SEED_BITS:
        raise BudgetExceededError(
            f"Extractor with n={n}, d={d} outside n ≤ {MAX_EXTRACTOR_QUBITS}, d ≤ {MAX_SEED_BITS}"
        )
    if kind == "pauli":
        if d != 2 * n:
            raise ValueError(f"The Pauli twirl on {n} qubits has d = {2 * n}, got {d}")
        return pauli_twirl_extractor(n)
    if kind != "haar":
        raise ValueError(f"Unknown extractor kind {kind!r}")

    rng = np.random.default_rng(seed)
    k = max(0.0, n - d / 2) if k is None else float(k)
    unitaries = tuple(random_unitary(2**n, rng) for _ in range(2**d))
    draft = Extractor(n, unitaries, k=k, epsilon=float("nan"), kind=kind)
    epsilon = extractor_error(draft, k, rng, battery)
    log.debug("extractor measured", n=n, d=d, k=k, epsilon=epsilon)
    return Extractor(n, unitaries, k=k, epsilon=epsilon, kind=kind)


def extractor_dilation(x: Extractor) -> np.ndarray:
    """
    Unitary on A ⊗ S (S: d selector qubits) with Tr_S(U(ρ ⊗ |0⟩⟨0|)U†) = T(ρ).

    The selectors are put in uniform superposition, then Uᵢ is applied to A
    controlled on selector value i.
    """
    if x.n + x.d > MAX_DENSE_QUBITS:
        raise BudgetExceededError(f"Dilation on {x.n + x.d} qubits exceeds {MAX_DENSE_QUBITS}")
    dim, seeds = x.dim, len(x.unitaries)
    select = np.zeros((dim, seeds, dim, seeds), dtype=complex)
    for i, u in enumerate(x.unitaries):
        select[:, i, :, i] = u
    select = select.reshape(dim * seeds, dim * seeds)
    spread = np.kron(np.eye(dim), hadamard(seeds) / np.sqrt(seeds))
    return select @ spread
