from itertools import combinations

import numpy as np

from qstate import RegisterLayout, random_unitary

from ._terms import LocalHamiltonian, LocalTerm

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def heisenberg_pair(layout: RegisterLayout, i: int = 0, j: int = 1) -> LocalTerm:
    """X⊗X + Y⊗Y + Z⊗Z on qubits i, j."""
    matrix = sum(np.kron(p, p) for p in (PAULI_X, PAULI_Y, PAULI_Z))
    return LocalTerm([i, j], matrix)


def random_local_hamiltonian(
    layout: RegisterLayout, rng: np.random.Generator, locality: int = 2, terms: int | None = None
) -> LocalHamiltonian:
    """
    Random k-local Hamiltonian with terms of norm at most one.

    Each term is U diag(λ) U† with Haar U and λ uniform in [−1, 1].
    """
    n = layout.total_qubits
    k = min(locality, n)
    supports = list(combinations(range(n), k))
    count = len(supports) if terms is None else terms

    out = []
    for _ in range(count):
        support = supports[rng.integers(len(supports))]
        u = random_unitary(2**k, rng)
        values = rng.uniform(-1.0, 1.0, size=2**k)
        out.append(LocalTerm(support, (u * values) @ u.conj().T))
    return LocalHamiltonian(layout, out, locality=k)
