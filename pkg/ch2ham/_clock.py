from dataclasses import dataclass
from enum import Enum

import numpy as np


class Encoding(str, Enum):
    """How clock operators are written on the unary clock qubits."""

    # |t⟩⟨t′| as rank-1 operators on the whole clock register
    AS_WRITTEN_UNARY = "unary"
    # Standard 2- and 3-clock-qubit forms, H_in on C₁ only
    KITAEV_3LOCAL = "kitaev"


@dataclass(frozen=True)
class ClockConfig:
    """
    Attributes:
        T: number of gates.
        L: number of idle steps appended after the gates.
        encoding: clock operator encoding.
    """

    T: int
    L: int
    encoding: Encoding = Encoding.KITAEV_3LOCAL

    def __post_init__(self):
        if self.T < 0 or self.L < 0:
            raise ValueError(f"T and L must be non-negative, got T={self.T}, L={self.L}")
        if self.T + self.L < 1:
            raise ValueError("The clock needs at least one step (T + L ≥ 1)")
        object.__setattr__(self, "encoding", Encoding(self.encoding))

    @property
    def clock_qubits(self) -> int:
        return self.T + self.L

    @property
    def time_steps(self) -> int:
        """Number of legal clock states, T + L + 1."""
        return self.T + self.L + 1


def clock_index(t: int, clock_qubits: int) -> int:
    """Basis index of |1^t 0^{M−t}⟩ with C₁ as the most significant bit."""
    return 2**clock_qubits - 2 ** (clock_qubits - t)


def legal_clock_indices(clock_qubits: int) -> np.ndarray:
    """Basis indices of the legal clock states |0⟩, …, |M⟩."""
    return np.array([clock_index(t, clock_qubits) for t in range(clock_qubits + 1)], dtype=np.int64)


def kitaev_window(t: int, clock_qubits: int) -> tuple[list[int], str, str]:
    """
    Clock qubits (1-based) and local bit patterns identifying |t⟩ and |t+1⟩.

    Returns:
        (clock positions, pattern of |t⟩, pattern of |t+1⟩)
    """
    m = clock_qubits
    if m == 1:
        return [1], "0", "1"
    if t == 0:
        return [1, 2], "00", "10"
    if t == m - 1:
        return [m - 1, m], "10", "11"
    return [t, t + 1, t + 2], "100", "110"
