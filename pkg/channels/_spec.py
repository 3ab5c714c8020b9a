from typing import Iterable, Sequence

import numpy as np

from qstate import ATOL, RegisterLayout
from qstate.errors import InvalidStateError, LayoutError


class GateStep:
    """A unitary on at most two qubits of a channel layout."""

    def __init__(self, unitary, support: Sequence[int]):
        """
        Parameters:
        - unitary: 2x2 or 4x4 unitary; the first support qubit is the most significant.
        - support: one or two distinct qubit indices in the A, B, E layout.
        """
        self._support = tuple(int(q) for q in support)
        if not 1 <= len(self._support) <= 2 or len(set(self._support)) != len(self._support):
            raise LayoutError(f"Gate support must be one or two distinct qubits, got {self._support}")

        self._unitary = np.array(unitary, dtype=complex)
        self._unitary.setflags(write=False)
        dim = 2 ** len(self._support)
        if self._unitary.shape != (dim, dim):
            raise LayoutError(f"Gate on {self._support} needs a {dim}x{dim} matrix")
        if np.abs(self._unitary.conj().T @ self._unitary - np.eye(dim)).max() > ATOL:
            raise InvalidStateError(f"Gate on {self._support} is not unitary")

    @property
    def unitary(self) -> np.ndarray:
        return self._unitary

    @property
    def support(self) -> tuple[int, ...]:
        return self._support

    def shifted(self, mapping) -> "GateStep":
        """The same gate with every support qubit passed through `mapping`."""
        return GateStep(self._unitary, [mapping(q) for q in self._support])

    def __repr__(self) -> str:
        return f"GateStep(support={list(self._support)})"


class ChannelSpec:
    """
    A channel in Stinespring form: the gate sequence V_T ⋯ V₁ acting on
    registers A (input), B (output, starts in |0⟩) and E (ancilla, starts in
    |0⟩, n_A + n_B qubits).
    """

    def __init__(self, n_a: int, n_b: int, steps: Iterable[GateStep] = ()):
        """
        Parameters:
        - n_a (int): input qubits.
        - n_b (int): output qubits.
        - steps: gates applied in order V₁, V₂, ….
        """
        if n_a < 1 or n_b < 1:
            raise LayoutError(f"Registers A and B need at least one qubit, got {n_a}, {n_b}")
        self._n_a = int(n_a)
        self._n_b = int(n_b)
        self._layout = RegisterLayout([("A", n_a), ("B", n_b), ("E", n_a + n_b)])
        self._steps = tuple(steps)

        n = self._layout.total_qubits
        for step in self._steps:
            if any(not 0 <= q < n for q in step.support):
                raise LayoutError(f"Gate support {step.support} outside {n} qubits")

    @property
    def n_a(self) -> int:
        return self._n_a

    @property
    def n_b(self) -> int:
        return self._n_b

    @property
    def n_e(self) -> int:
        return self._n_a + self._n_b

    @property
    def layout(self) -> RegisterLayout:
        return self._layout

    @property
    def steps(self) -> tuple[GateStep, ...]:
        return self._steps

    @property
    def T(self) -> int:
        return len(self._steps)

    @property
    def ancilla_qubits(self) -> list[int]:
        """Qubits that start in |0⟩: all of B and E."""
        return self._layout.qubit_indices("B") + self._layout.qubit_indices("E")

    def __repr__(self) -> str:
        return f"ChannelSpec(n_a={self._n_a}, n_b={self._n_b}, T={self.T})"


def with_purified_input(channel: ChannelSpec) -> ChannelSpec:
    """
    Add a reference copy of the input register that is immediately traced out.

    The new input register holds the old A qubits followed by n_A reference
    qubits, so Φ'(ρ) = Φ(Tr_ref ρ). E grows to keep the n_A + n_B convention;
    gates are re-indexed and never touch the reference.

    Parameters:
    - channel (ChannelSpec): the channel to transform.

    Returns:
    - ChannelSpec: a channel with 2·n_A input qubits.
    """
    n_a, n_b = channel.n_a, channel.n_b
    new_a = 2 * n_a

    def remap(q: int) -> int:
        if q < n_a:
            return q
        if q < n_a + n_b:
            return new_a + (q - n_a)
        return new_a + n_b + (q - n_a - n_b)

    return ChannelSpec(new_a, n_b, [step.shifted(remap) for step in channel.steps])
