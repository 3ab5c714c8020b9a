from typing import Any, NamedTuple

from channels import CNOT, IDENTITY, SWAP, ChannelSpec, GateStep, constant_channel, replacement_channel
from qstate import HADAMARD

from ._instances import Decision, MaxOutQEAInstance, PPIOInstance

# Thresholds shared by the curated product-isometry instances
SUITE_A = 1e-3
SUITE_B = 1.41


class SuiteCase(NamedTuple):
    name: str
    instance: Any
    expected: Decision


def _bell_maker() -> list[GateStep]:
    """
    On A, B₀, B₁: move the input into B₀, then entangle A with B₁.

    Every input ends as ψ_B₀ ⊗ Φ⁺_AB₁, so λ₁² = 1/2 across A | B.
    """
    return [
        GateStep(CNOT, [0, 1]),
        GateStep(CNOT, [1, 0]),
        GateStep(HADAMARD, [2]),
        GateStep(CNOT, [2, 0]),
    ]


def ppio_suite() -> list[SuiteCase]:
    """
    Three product-output circuits on n_A = n_B = 1 and three circuits on
    n_A = 1, n_B = 2 whose outputs all sit at distance √2 from product.

    A 2-dimensional subspace of two qubits always contains a product state,
    so the far-from-product circuits need a second output qubit.
    """
    yes = [
        ("idle", ChannelSpec(1, 1, [GateStep(IDENTITY, [0])])),
        ("swap", ChannelSpec(1, 1, [GateStep(SWAP, [0, 1])])),
        ("cnot", ChannelSpec(1, 1, [GateStep(CNOT, [0, 1])])),
    ]
    no = [
        ("bell-maker", ChannelSpec(1, 2, _bell_maker())),
        ("bell-maker-controlled", ChannelSpec(1, 2, _bell_maker() + [GateStep(CNOT, [0, 1])])),
        ("bell-maker-rotated", ChannelSpec(1, 2, _bell_maker() + [GateStep(HADAMARD, [1])])),
    ]
    cases = [SuiteCase(name, PPIOInstance(c, SUITE_A, SUITE_B), Decision.YES) for name, c in yes]
    cases += [SuiteCase(name, PPIOInstance(c, SUITE_A, SUITE_B), Decision.NO) for name, c in no]
    return cases


def maxoutqea_suite() -> list[SuiteCase]:
    """Ĩ-output channel at τ = 0 (YES) and |0⟩-output channel at τ = 1 (NO)."""
    return [
        SuiteCase("replacement", MaxOutQEAInstance(replacement_channel(), 0.0), Decision.YES),
        SuiteCase("constant", MaxOutQEAInstance(constant_channel(), 1.0), Decision.NO),
    ]
