import numpy as np

from qstate import HADAMARD, random_unitary

from ._spec import ChannelSpec, GateStep

IDENTITY = np.eye(2, dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

# Maps |00⟩ to (|00⟩ + |11⟩)/√2
BELL_PREP = CNOT @ np.kron(HADAMARD, IDENTITY)


def identity_channel(n: int = 1) -> ChannelSpec:
    """Φ(ρ) = ρ, realised by swapping every A qubit into B."""
    return ChannelSpec(n, n, [GateStep(SWAP, [i, n + i]) for i in range(n)])


def depolarizing_channel() -> ChannelSpec:
    """
    One-qubit fully depolarising channel Φ(ρ) = Ĩ.

    Two E qubits in |+⟩ select X and Z corrections on A (an exact Pauli
    twirl), then A is swapped into B.
    """
    return ChannelSpec(
        1,
        1,
        [
            GateStep(HADAMARD, [2]),
            GateStep(HADAMARD, [3]),
            GateStep(CNOT, [2, 0]),
            GateStep(CZ, [3, 0]),
            GateStep(SWAP, [0, 1]),
        ],
    )


def replacement_channel() -> ChannelSpec:
    """Φ(ρ) = Ĩ for every input: B is maximally entangled with E in one gate."""
    return ChannelSpec(1, 1, [GateStep(BELL_PREP, [1, 2])])


def constant_channel() -> ChannelSpec:
    """Φ(ρ) = |0⟩⟨0|: a single idle gate on A, B never touched."""
    return ChannelSpec(1, 1, [GateStep(IDENTITY, [0])])


def random_channel(n_a: int, n_b: int, steps: int, rng: np.random.Generator) -> ChannelSpec:
    """Channel built from Haar-random two-qubit gates on random qubit pairs."""
    n = 2 * (n_a + n_b)
    gates = []
    for _ in range(steps):
        pair = rng.choice(n, size=2, replace=False)
        gates.append(GateStep(random_unitary(4, rng), [int(q) for q in pair]))
    return ChannelSpec(n_a, n_b, gates)
