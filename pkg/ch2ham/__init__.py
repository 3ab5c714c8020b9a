from ._clock import ClockConfig, Encoding, clock_index, kitaev_window, legal_clock_indices
from ._build import MAX_LEGAL_DIM, ClockHamiltonian, build, legal_blocks
from ._history import history_basis, history_state
from ._certify import (
    DEFAULT_SWEEP,
    GapCertificate,
    GapSweep,
    WitnessExtraction,
    certify_gap,
    clock_gap,
    extract_witness,
    gap_sweep,
)
