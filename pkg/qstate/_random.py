import numpy as np
from scipy.stats import unitary_group

from ._layout import RegisterLayout
from ._state import DensityMatrix, PureState


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary."""
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_pure_state(layout: RegisterLayout, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    vector = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return PureState.normalized(layout, vector)


def random_density_matrix(
    layout: RegisterLayout, rng: np.random.Generator, rank: int | None = None
) -> DensityMatrix:
    """Random mixed state G G† / Tr(G G†) with a Ginibre matrix G of the given rank."""
    rank = layout.dim if rank is None else rank
    g = rng.normal(size=(layout.dim, rank)) + 1j * rng.normal(size=(layout.dim, rank))
    rho = g @ g.conj().T
    return DensityMatrix(layout, rho / np.trace(rho).real, validate=False)


def maximally_mixed(layout: RegisterLayout) -> DensityMatrix:
    """Ĩ = I/d on the layout."""
    return DensityMatrix(layout, np.eye(layout.dim) / layout.dim, validate=False)


def basis_state(layout: RegisterLayout, index: int | str = 0) -> PureState:
    """Computational basis state, given as an integer or a bit string."""
    if isinstance(index, str):
        index = int(index, 2)
    vector = np.zeros(layout.dim, dtype=complex)
    vector[index] = 1.0
    return PureState(layout, vector, validate=False)


def bell_state(names: tuple[str, str] = ("A", "B")) -> PureState:
    """|Φ⁺⟩ = (|00⟩ + |11⟩)/√2 on two one-qubit registers."""
    layout = RegisterLayout([(names[0], 1), (names[1], 1)])
    return PureState(layout, np.array([1, 0, 0, 1]) / np.sqrt(2), validate=False)


def maximally_entangled_state(left: RegisterLayout, right: RegisterLayout) -> PureState:
    """Σᵢ |i⟩|i⟩/√d between two registers of equal dimension."""
    d = left.dim
    vector = np.eye(d, right.dim).ravel() / np.sqrt(d)
    return PureState(left.concat(right), vector, validate=False)
