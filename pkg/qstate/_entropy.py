import numpy as np
from scipy.stats import entropy as _shannon

from ._constants import EIGEN_CLAMP
from ._state import DensityMatrix, PureState


def _spectrum(state: PureState | DensityMatrix) -> np.ndarray:
    if isinstance(state, PureState):
        return np.array([1.0])
    return state.eigenvalues()


def vn_entropy(state: PureState | DensityMatrix) -> float:
    """
    Von Neumann entropy in bits.

    Eigenvalues at or below EIGEN_CLAMP contribute nothing.

    Parameters:
    - state: a density matrix (a pure state always returns 0).

    Returns:
    - float: −Σ λ log₂ λ, clipped to [0, log₂ dim].
    """
    w = _spectrum(state)
    w = w[w > EIGEN_CLAMP]
    value = float(-np.sum(w * np.log2(w)))
    return min(max(value, 0.0), float(np.log2(state.dim)))


def min_entropy(state: PureState | DensityMatrix) -> float:
    """−log₂ of the largest eigenvalue, in bits."""
    largest = float(_spectrum(state).max())
    return max(0.0, -float(np.log2(largest)))


def shannon_entropy(probabilities) -> float:
    """Shannon entropy of a probability vector in bits."""
    return float(_shannon(np.asarray(probabilities, dtype=float), base=2))
