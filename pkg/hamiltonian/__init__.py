from ._terms import GibbsSpec, LocalHamiltonian, LocalTerm, assemble
from ._spectrum import SpectralSummary, energy, operator_norm, spectral_gap, spectrum
from ._thermal import (
    LN2,
    free_energy,
    free_energy_functional,
    gibbs_state,
    log_partition_function,
    partition_function,
)
from ._sampling import sampled_energy_estimate, term_expectations
from ._io import (
    HamiltonianDocument,
    hamiltonian_from_document,
    hamiltonian_to_document,
    load_hamiltonian,
)
from ._paulis import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, heisenberg_pair, random_local_hamiltonian
