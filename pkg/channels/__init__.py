from ._spec import ChannelSpec, GateStep, with_purified_input
from ._apply import (
    apply_channel,
    apply_choi,
    choi_state,
    dilation_unitary,
    run_dilation,
)
from ._library import (
    BELL_PREP,
    CNOT,
    CZ,
    IDENTITY,
    SWAP,
    constant_channel,
    depolarizing_channel,
    identity_channel,
    random_channel,
    replacement_channel,
)
from ._io import channel_from_document, channel_to_document, load_channel
