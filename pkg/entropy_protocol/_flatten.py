from typing import NamedTuple

import numpy as np

from qstate import (
    LEVEL_TOL,
    MAX_DENSE_QUBITS,
    ZERO_PROBABILITY,
    DensityMatrix,
    RegisterLayout,
    min_entropy,
    trace_norm_distance,
    vn_entropy,
)
from qstate.errors import BudgetExceededError, LayoutError, ZeroProbabilityError


def copies_layout(layout: RegisterLayout, q: int) -> RegisterLayout:
    """Each register widened to hold q copies, copy 1 first."""
    if not layout.is_qubit_layout:
        raise LayoutError(f"Copies need a qubit layout, got {layout}")
    return RegisterLayout([(r.name, r.qubits * q) for r in layout])


def group_copies(matrix: np.ndarray, layout: RegisterLayout, q: int) -> np.ndarray:
    """
    Reorder an operator on (R₁ R₂ …)^{⊗q} into R₁^{⊗q} R₂^{⊗q} ….

    Parameters:
    - matrix: operator with the copies as the outer tensor factors.
    - layout: the single-copy layout.
    - q: number of copies.
    """
    dims = list(layout.dims)
    r = len(dims)
    factors = dims * q
    # copy c of register j sits at factor c·r + j
    order = [c * r + j for j in range(r) for c in range(q)]
    n = len(factors)
    t = matrix.reshape(factors + factors)
    t = t.transpose(order + [n + i for i in order])
    size = int(np.prod(factors))
    return t.reshape(size, size)


def tensor_power(rho: DensityMatrix, q: int) -> DensityMatrix:
    """ρ^{⊗q} on copies_layout(ρ.layout, q)."""
    if q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    if rho.layout.total_qubits * q > MAX_DENSE_QUBITS:
        raise BudgetExceededError(
            f"{q} copies of {rho.layout.total_qubits} qubits exceed {MAX_DENSE_QUBITS}"
        )
    matrix = rho.matrix
    for _ in range(q - 1):
        matrix = np.kron(matrix, rho.matrix)
    return DensityMatrix(copies_layout(rho.layout, q), group_copies(matrix, rho.layout, q), validate=False)


class FlattenResult(NamedTuple):
    state: DensityMatrix
    min_entropy: float
    distance: float
    guaranteed_min_entropy: float
    discarded: float


def flattening_bound(entropy: float, n: int, q: int, epsilon: float) -> float:
    """q·S(ρ) − (n + log₂(q/ε))·√(q log₂(1/ε)), the O(·) constant taken as 1."""
    return q * entropy - (n + np.log2(q / epsilon)) * np.sqrt(q * np.log2(1 / epsilon))


def flatten(rho: DensityMatrix, q: int, epsilon: float) -> FlattenResult:
    """
    Flatten ρ^{⊗q} by cutting its largest eigenvalues.

    Whole eigenvalue levels of ρ^{⊗q} are removed from the top while the
    discarded weight stays ≤ ε; the rest is renormalised, so
    ‖ρ^{⊗q} − σ‖₁ ≤ 2ε.

    Parameters:
    - rho (DensityMatrix): an n-qubit state, q·n ≤ MAX_DENSE_QUBITS.
    - q (int): copies.
    - epsilon (float): discarded weight, in (0, 1).

    Returns:
    - FlattenResult: σ, H∞(σ), the measured ‖ρ^{⊗q} − σ‖₁, the flattening
      lower bound on H∞ and the discarded weight.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"ε must lie in (0, 1), got {epsilon}")
    power = tensor_power(rho, q)

    w, v = np.linalg.eigh((rho.matrix + rho.matrix.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    values = w
    vectors = v
    for _ in range(q - 1):
        values = np.kron(values, w)
        vectors = np.kron(vectors, v)

    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    keep = np.ones(values.size, dtype=bool)
    discarded = 0.0
    start = 0
    while start < values.size:
        level = values[start]
        stop = start + int(np.sum(np.abs(values[start:] - level) <= LEVEL_TOL * max(level, 1.0)))
        mass = float(values[start:stop].sum())
        if discarded + mass > epsilon:
            break
        keep[start:stop] = False
        discarded += mass
        start = stop

    kept = float(values[keep].sum())
    if kept <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"Nothing of ρ^⊗{q} survives flattening at ε = {epsilon}")

    matrix = (vectors[:, keep] * (values[keep] / kept)) @ vectors[:, keep].conj().T
    sigma = DensityMatrix(power.layout, group_copies(matrix, rho.layout, q), validate=False)
    bound = flattening_bound(vn_entropy(rho), rho.layout.total_qubits, q, epsilon)
    return FlattenResult(
        sigma,
        min_entropy(sigma),
        trace_norm_distance(power, sigma),
        float(bound),
        discarded,
    )
