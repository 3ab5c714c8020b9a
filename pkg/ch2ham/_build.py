from __future__ import annotations

from functools import cached_property

import numpy as np
import structlog
from scipy import sparse
from scipy.linalg import eigh_tridiagonal

from channels import ChannelSpec
from hamiltonian import LocalHamiltonian, LocalTerm, SpectralSummary, spectral_gap, spectrum
from qstate import ATOL, MAX_DENSE_QUBITS, DensityMatrix, PureState, RegisterLayout, embed_operator
from qstate.errors import BudgetExceededError, LayoutError

from ._clock import ClockConfig, Encoding, clock_index, kitaev_window

log = structlog.get_logger(__name__)

# Largest legal-view dimension, work basis states times time steps
MAX_LEGAL_DIM = 2**18

# Largest clock for which rank-1 unary clock operators are assembled
MAX_UNARY_CLOCK_QUBITS = 20

# Largest number of amplitudes held in a legal-view low-energy basis
MAX_BASIS_ENTRIES = 2**25

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def _unit(dim: int, row: int, col: int) -> sparse.csr_array:
    return sparse.csr_array(([1.0 + 0j], ([row], [col])), shape=(dim, dim))


class ClockHamiltonian:
    """
    H_Φ = H_in + H_prop + H_clock for a channel dilation followed by L idle steps.

    Two exact views are exposed:
    - `base`: the LocalHamiltonian on A, B, E and a unary clock register C
      of T+L qubits.
    - the legal view (`layout`, `sparse()`): H restricted to A ⊗ B ⊗ E ⊗
      span{|0⟩, …, |T+L⟩}, where C is a compressed register. H_in and H_prop
      never leave this subspace and H_clock vanishes on it, so below energy 1
      both views share their spectrum.
    """

    def __init__(self, channel: ChannelSpec, config: ClockConfig):
        if config.T != channel.T:
            raise LayoutError(f"Clock configured for {config.T} gates, channel has {channel.T}")
        work_dim = 2**channel.layout.total_qubits
        legal_dim = work_dim * config.time_steps
        if legal_dim > MAX_LEGAL_DIM:
            raise BudgetExceededError(
                f"Legal clock space of dimension {legal_dim} exceeds {MAX_LEGAL_DIM}"
            )
        self._channel = channel
        self._config = config

    @property
    def channel(self) -> ChannelSpec:
        return self._channel

    @property
    def config(self) -> ClockConfig:
        return self._config

    @property
    def work_qubits(self) -> int:
        return self._channel.layout.total_qubits

    @property
    def work_dim(self) -> int:
        return 2**self.work_qubits

    @property
    def time_steps(self) -> int:
        return self._config.time_steps

    @property
    def clock_qubits(self) -> int:
        return self._config.clock_qubits

    @cached_property
    def layout(self) -> RegisterLayout:
        """A, B, E followed by the compressed legal clock register."""
        clock = RegisterLayout([("C", self.clock_qubits, self.time_steps)])
        return self._channel.layout.concat(clock)

    @cached_property
    def qubit_layout(self) -> RegisterLayout:
        return self._channel.layout.concat(RegisterLayout([("C", self.clock_qubits)]))

    @cached_property
    def base(self) -> LocalHamiltonian:
        """H_Φ on the unary qubit clock, written with the configured encoding."""
        m = self.clock_qubits
        unary = self._config.encoding is Encoding.AS_WRITTEN_UNARY
        if unary and m > MAX_UNARY_CLOCK_QUBITS:
            raise BudgetExceededError(
                f"Unary clock operators on {m} qubits exceed {MAX_UNARY_CLOCK_QUBITS}"
            )

        clock = [self.work_qubits + i for i in range(m)]
        terms = self._input_terms(clock) + self._propagation_terms(clock)
        terms += [LocalTerm([clock[i], clock[i + 1]], np.kron(P0, P1)) for i in range(m - 1)]
        return LocalHamiltonian(self.qubit_layout, terms)

    def _input_terms(self, clock: list[int]) -> list[LocalTerm]:
        # |1⟩⟨1| on each ancilla while the clock reads |0⟩
        layout = self._channel.layout
        ancillas = layout.qubit_indices("B") + layout.qubit_indices("E")
        if self._config.encoding is Encoding.KITAEV_3LOCAL:
            return [LocalTerm([a, clock[0]], np.kron(P1, P0)) for a in ancillas]
        zero = _unit(2 ** len(clock), 0, 0)
        return [LocalTerm([a, *clock], sparse.kron(P1, zero, format="csr")) for a in ancillas]

    def _clock_window(self, t: int, clock: list[int]):
        m = self.clock_qubits
        if self._config.encoding is Encoding.KITAEV_3LOCAL:
            positions, now, after = kitaev_window(t, m)
            support = [clock[p - 1] for p in positions]
            i, j = int(now, 2), int(after, 2)
        else:
            support = list(clock)
            i, j = clock_index(t, m), clock_index(t + 1, m)
        dim = 2 ** len(support)
        return support, _unit(dim, i, i) + _unit(dim, j, j), _unit(dim, j, i)

    def _propagation_terms(self, clock: list[int]) -> list[LocalTerm]:
        terms = []
        steps = self._channel.steps
        for t in range(self.clock_qubits):
            support, diagonal, forward = self._clock_window(t, clock)
            if t >= len(steps):
                terms.append(LocalTerm(support, diagonal - forward - forward.T))
                continue
            gate = sparse.csr_array(steps[t].unitary)
            eye = sparse.identity(gate.shape[0], dtype=complex, format="csr")
            matrix = (
                sparse.kron(eye, diagonal)
                - sparse.kron(gate, forward)
                - sparse.kron(gate.conj().T, forward.T)
            )
            terms.append(LocalTerm([*steps[t].support, *support], matrix))
        return terms

    @cached_property
    def gate_operators(self) -> tuple[sparse.csr_array, ...]:
        """Every gate embedded into the work space A ⊗ B ⊗ E."""
        sites = [2] * self.work_qubits
        return tuple(embed_operator(step.unitary, sites, step.support) for step in self._channel.steps)

    @cached_property
    def penalty_counts(self) -> np.ndarray:
        """Number of ancilla qubits set to 1 in every work basis state."""
        layout = self._channel.layout
        ancillas = layout.qubit_indices("B") + layout.qubit_indices("E")
        x = np.arange(self.work_dim, dtype=np.int64)
        counts = np.zeros(self.work_dim, dtype=np.int64)
        for q in ancillas:
            counts += (x >> (self.work_qubits - 1 - q)) & 1
        return counts

    @cached_property
    def path_degree(self) -> np.ndarray:
        """Diagonal of the clock path Laplacian Σ_t |t⟩⟨t| + |t+1⟩⟨t+1|."""
        degree = np.zeros(self.time_steps)
        degree[:-1] += 1
        degree[1:] += 1
        return degree

    @cached_property
    def _legal(self) -> sparse.csr_array:
        n, T = self.time_steps, self._config.T
        eye = sparse.identity(self.work_dim, dtype=complex, format="csr")

        total = sparse.kron(sparse.diags_array(self.penalty_counts.astype(complex)), _unit(n, 0, 0))
        total = total + sparse.kron(eye, sparse.diags_array(self.path_degree.astype(complex)))

        idle = np.arange(T, n - 1)
        if idle.size:
            forward = sparse.csr_array(
                (np.ones(idle.size, dtype=complex), (idle + 1, idle)), shape=(n, n)
            )
            total = total - sparse.kron(eye, forward + forward.T)

        for t, gate in enumerate(self.gate_operators):
            forward = _unit(n, t + 1, t)
            total = total - sparse.kron(gate, forward) - sparse.kron(gate.conj().T, forward.T)
        return sparse.csr_array(total)

    def sparse(self) -> sparse.csr_array:
        """The legal-view operator, index work·(T+L+1) + t."""
        return self._legal

    def propagate(self, work_vector: np.ndarray) -> np.ndarray:
        """
        Rows Uₜ|x⟩ for t = 0, …, T+L, with Uₜ = Vₜ ⋯ V₁ and Vₜ = I past T.

        Parameters:
        - work_vector (np.ndarray): a vector on A ⊗ B ⊗ E.

        Returns:
        - np.ndarray: shape (T+L+1, work_dim).
        """
        rows = np.empty((self.time_steps, self.work_dim), dtype=complex)
        current = np.asarray(work_vector, dtype=complex)
        rows[0] = current
        for t in range(1, self.time_steps):
            if t <= len(self.gate_operators):
                current = self.gate_operators[t - 1] @ current
            rows[t] = current
        return rows

    def legal_isometry(self) -> sparse.csr_array:
        """Sparse isometry from the legal view into the unary qubit layout."""
        m = self.clock_qubits
        if self.work_qubits + m > MAX_DENSE_QUBITS:
            raise BudgetExceededError(
                f"Unary clock layout on {self.work_qubits + m} qubits exceeds {MAX_DENSE_QUBITS}"
            )
        n = self.time_steps
        x = np.repeat(np.arange(self.work_dim, dtype=np.int64), n)
        t = np.tile(np.arange(n), self.work_dim)
        clock = np.array([clock_index(s, m) for s in range(n)], dtype=np.int64)
        rows = x * 2**m + clock[t]
        cols = np.arange(self.work_dim * n)
        return sparse.csr_array(
            (np.ones(cols.size, dtype=complex), (rows, cols)),
            shape=(self.qubit_layout.dim, self.work_dim * n),
        )

    def embed(self, state: PureState | DensityMatrix) -> PureState | DensityMatrix:
        """Map a legal-view state into the unary qubit layout of `base`."""
        if state.layout != self.layout:
            raise LayoutError(f"Expected a legal-view state on {self.layout}, got {state.layout}")
        iso = self.legal_isometry()
        if isinstance(state, PureState):
            return PureState(self.qubit_layout, iso @ state.amplitudes, validate=False)
        return DensityMatrix(self.qubit_layout, (iso @ (iso @ state.matrix).T).T, validate=False)

    def __repr__(self) -> str:
        return (
            f"ClockHamiltonian(T={self._config.T}, L={self._config.L}, "
            f"encoding={self._config.encoding.value}, work_qubits={self.work_qubits})"
        )


def build(channel: ChannelSpec, config: ClockConfig) -> ClockHamiltonian:
    """
    Build the clock Hamiltonian of a channel dilation.

    Parameters:
    - channel (ChannelSpec): the channel; config.T must equal its gate count.
    - config (ClockConfig): idle steps and clock encoding.

    Returns:
    - ClockHamiltonian: both views of H_Φ.
    """
    hc = ClockHamiltonian(channel, config)
    log.debug("clock hamiltonian built", T=config.T, L=config.L, encoding=config.encoding.value)
    return hc


def legal_blocks(hc: ClockHamiltonian) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """
    Eigen-decomposition of every propagation-frame block.

    In the frame Σₜ Uₜ ⊗ |t⟩⟨t| the legal view splits into one tridiagonal
    block per work basis state x: the path Laplacian plus D_x |0⟩⟨0|.

    Returns:
    - dict: penalty count D → (eigenvalues, eigenvectors) of its block.
    """
    off = -np.ones(hc.time_steps - 1)
    blocks = {}
    for count in np.unique(hc.penalty_counts):
        diagonal = hc.path_degree.copy()
        diagonal[0] += count
        blocks[int(count)] = eigh_tridiagonal(diagonal, off)
    return blocks


@spectrum.register
def _(hamiltonian: ClockHamiltonian, cutoff: float | None = None) -> SpectralSummary:
    blocks = legal_blocks(hamiltonian)
    counts = hamiltonian.penalty_counts
    multiplicity = {p: int(np.sum(counts == p)) for p in blocks}

    eigenvalues = np.sort(np.concatenate([np.tile(w, multiplicity[p]) for p, (w, _) in blocks.items()]))
    log.debug("legal-blocks spectrum", blocks=len(blocks), dim=eigenvalues.size)

    basis = None
    if cutoff is not None:
        selected = []
        for x, p in enumerate(counts):
            w, v = blocks[int(p)]
            selected.extend((w[k], x, k) for k in np.flatnonzero(w <= cutoff + ATOL))
        selected.sort()

        dim = hamiltonian.work_dim * hamiltonian.time_steps
        if len(selected) * dim > MAX_BASIS_ENTRIES:
            raise BudgetExceededError(
                f"Low-energy basis of {len(selected)} vectors in dimension {dim} is too large"
            )
        columns: dict[int, list[tuple[int, int]]] = {}
        for column, (_, x, k) in enumerate(selected):
            columns.setdefault(x, []).append((column, k))

        basis = np.empty((dim, len(selected)), dtype=complex)
        for x, entries in columns.items():
            start = np.zeros(hamiltonian.work_dim, dtype=complex)
            start[x] = 1.0
            rows = hamiltonian.propagate(start)
            vectors = blocks[int(counts[x])][1]
            for column, k in entries:
                basis[:, column] = (rows.T * vectors[:, k][None, :]).ravel()

    return SpectralSummary(
        ground_energy=float(eigenvalues[0]),
        gap=spectral_gap(eigenvalues),
        eigenvalues=eigenvalues,
        low_energy_basis=basis,
        cutoff=cutoff,
        method="legal-blocks",
    )
