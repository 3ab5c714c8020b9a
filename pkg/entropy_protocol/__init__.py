from ._extractor import (
    Extractor,
    apply_extractor,
    extractor_dilation,
    extractor_error,
    high_min_entropy_state,
    make_extractor,
    pauli_strings,
    pauli_twirl_extractor,
)
from ._flatten import FlattenResult, copies_layout, flatten, flattening_bound, tensor_power
from ._config import (
    ProtocolConfig,
    certified_entropy_bound,
    completeness,
    entropy_slack,
    solve_parameters,
)
from ._protocol import (
    PROMISE_TOL,
    HonestProverState,
    ProtocolResult,
    align_marginal,
    average_output,
    honest_prover_state,
    misaligned_state,
    protocol_layout,
    random_promise_state,
    run_protocol,
)
from ._verifiers import VerifierOutcome, run_fea_protocol, run_heles_protocol, verifier_delta
