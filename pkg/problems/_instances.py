from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple, Optional

import numpy as np

from ch2ham import ClockHamiltonian
from channels import ChannelSpec
from hamiltonian import LocalHamiltonian
from qstate import DensityMatrix, PureState, RegisterLayout
from qstate.errors import InvalidInstanceError, LayoutError

Hamiltonian = LocalHamiltonian | ClockHamiltonian


class Decision(str, Enum):
    YES = "YES"
    NO = "NO"
    UNDECIDED = "UNDECIDED"

    @property
    def exit_code(self) -> int:
        return {Decision.YES: 0, Decision.NO: 1, Decision.UNDECIDED: 2}[self]


class OptimizerReport(NamedTuple):
    restarts: int
    iterations: int
    evaluations: int
    best_objective: float

    @staticmethod
    def merge(*reports: "OptimizerReport") -> "OptimizerReport":
        """Totals of several runs; the best objective is taken from the last one."""
        return OptimizerReport(
            sum(r.restarts for r in reports),
            sum(r.iterations for r in reports),
            sum(r.evaluations for r in reports),
            reports[-1].best_objective,
        )


@dataclass(frozen=True)
class Verdict:
    """
    Outcome of a brute-force decider.

    Attributes:
        decision: YES, NO or UNDECIDED.
        value: the optimised quantity the decision was read from.
        witness: a state certifying YES (None otherwise).
        energy: energy of the witness, when it has one.
        report: optimizer statistics, None for closed-form deciders.
        details: every other number the decider looked at.
    """

    decision: Decision
    value: float
    witness: Optional[PureState | DensityMatrix] = None
    energy: Optional[float] = None
    report: Optional[OptimizerReport] = None
    details: dict[str, Any] = field(default_factory=dict)


def _check_cut(layout: RegisterLayout, cut: tuple[str, ...]):
    left = layout.resolve(cut)
    if not left or not layout.complement(left):
        raise LayoutError(f"Trivial cut {cut} on {layout}")


def _check_gap(low: float, high: float, what: str):
    if not np.isfinite(low) or not np.isfinite(high) or high - low <= 0:
        raise InvalidInstanceError(f"Need {what} gap > 0, got {low} and {high}")


@dataclass(frozen=True)
class _EntropyInstance:
    hamiltonian: Hamiltonian
    alpha: float
    beta: float
    s: float
    t: float
    cut: tuple[str, ...] = ("A",)

    def __post_init__(self):
        object.__setattr__(self, "cut", tuple(self.cut))
        _check_gap(self.alpha, self.beta, "energy")
        _check_gap(self.t, self.s, "entropy")
        _check_cut(self.hamiltonian.layout, self.cut)


@dataclass(frozen=True)
class HELESInstance(_EntropyInstance):
    """Is there a state with energy ≤ α and S(ψ_cut) ≥ s, or do all states with energy ≤ β have S ≤ t?"""


@dataclass(frozen=True)
class LELESInstance(_EntropyInstance):
    """Is there a state with energy ≤ α and S(ψ_cut) ≤ t, or do all states with energy ≤ β have S ≥ s?"""


@dataclass(frozen=True)
class LEAPSInstance:
    """
    Is there a state with energy ≤ α within trace distance a of a product
    state across the cut, or is every state with energy ≤ β at least b far?

    Distances use the full trace norm, so a and b lie in [0, 2).
    """

    hamiltonian: Hamiltonian
    alpha: float
    beta: float
    a: float
    b: float
    cut: tuple[str, ...] = ("A",)

    def __post_init__(self):
        object.__setattr__(self, "cut", tuple(self.cut))
        _check_gap(self.alpha, self.beta, "energy")
        if not 0 <= self.a < self.b < 2:
            raise InvalidInstanceError(f"Need 0 ≤ a < b < 2, got a={self.a}, b={self.b}")
        _check_cut(self.hamiltonian.layout, self.cut)


@dataclass(frozen=True)
class FEAInstance:
    """Is the free energy −(1/β) ln Z at most a or at least b (in the energy units of H)?"""

    hamiltonian: Hamiltonian
    beta: float
    a: float
    b: float

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise InvalidInstanceError(f"Inverse temperature must be finite and > 0, got {self.beta}")
        _check_gap(self.a, self.b, "free-energy")


@dataclass(frozen=True)
class PPIOInstance:
    """
    Does some input ψ make the isometry output U(ψ ⊗ |0⟩) on A, B a-close to
    a product across A | B, or is every output at least b far?

    The isometry is the circuit with E unused; distances use the full trace norm.
    """

    circuit: ChannelSpec
    a: float
    b: float

    def __post_init__(self):
        if not 0 <= self.a < self.b <= 2:
            raise InvalidInstanceError(f"Need 0 ≤ a < b ≤ 2, got a={self.a}, b={self.b}")
        ancilla = set(self.circuit.layout.qubit_indices("E"))
        for step in self.circuit.steps:
            if ancilla.intersection(step.support):
                raise InvalidInstanceError(f"Isometry gate {step} touches the ancilla register E")


@dataclass(frozen=True)
class MaxOutQEAInstance:
    """Is there an input with S(Φ(ρ)) ≥ τ + 1, or do all inputs give S(Φ(ρ)) ≤ τ − 1?"""

    channel: ChannelSpec
    tau: float

    def __post_init__(self):
        if not np.isfinite(self.tau) or self.tau < 0:
            raise InvalidInstanceError(f"Need τ ≥ 0, got {self.tau}")


@dataclass(frozen=True)
class CIMMInstance:
    """Is some output ‖Φ(ρ) − Ĩ‖₁ ≤ a, or are all outputs at least b far from Ĩ?"""

    channel: ChannelSpec
    a: float
    b: float

    def __post_init__(self):
        if not (0 < self.a < 1 and 0 < self.b < 1):
            raise InvalidInstanceError(f"Need a, b in (0, 1), got a={self.a}, b={self.b}")
        if (1 - self.a) ** 2 <= 1 - self.b**2:
            raise InvalidInstanceError(f"Need (1−a)² > 1−b², got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class SeparableInstance:
    """Is there a product state φ_L⊗φ_R across the cut with energy ≤ α, or do all have energy ≥ β?"""

    hamiltonian: Hamiltonian
    alpha: float
    beta: float
    cut: tuple[str, ...] = ("A",)

    def __post_init__(self):
        object.__setattr__(self, "cut", tuple(self.cut))
        _check_gap(self.alpha, self.beta, "energy")
        _check_cut(self.hamiltonian.layout, self.cut)
