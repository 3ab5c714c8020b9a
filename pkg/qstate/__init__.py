from ._constants import (
    ATOL,
    DENSE_NORM_QUBITS,
    EIGEN_CLAMP,
    LEVEL_TOL,
    MAX_DENSE_QUBITS,
    ZERO_PROBABILITY,
)
from ._layout import Register, RegisterLayout
from ._state import DensityMatrix, PureState, as_density
from ._algebra import (
    apply_operator,
    embed_operator,
    evolve,
    partial_trace,
    reduce_sites,
    target_sites,
    tensor,
)
from ._entropy import min_entropy, shannon_entropy, vn_entropy
from ._distance import fidelity, pure_state_distance, trace_norm_distance
from ._decompose import (
    SchmidtTerm,
    align_purification,
    cut_matrix,
    purify,
    schmidt,
    schmidt_coefficients,
)
from ._bounds import (
    HADAMARD,
    fannes_bound,
    post_measure,
    swap_test_circuit_prob,
    swap_test_prob,
)
from ._random import (
    basis_state,
    bell_state,
    maximally_entangled_state,
    maximally_mixed,
    random_density_matrix,
    random_pure_state,
    random_unitary,
)
from . import errors
from ._codec import (
    StateDocument,
    decode_complex,
    dump_json,
    encode_complex,
    parse_document,
    read_json,
    state_from_document,
    state_to_document,
)
