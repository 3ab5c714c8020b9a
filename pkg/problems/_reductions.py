from typing import Any, Callable, NamedTuple

import numpy as np
import structlog

from ch2ham import MAX_LEGAL_DIM, ClockConfig, ClockHamiltonian, Encoding, build, clock_gap
from channels import ChannelSpec, with_purified_input
from hamiltonian import operator_norm
from qstate import fannes_bound
from qstate.errors import InfeasibleParameterError, InvalidInstanceError

from ._instances import (
    HELESInstance,
    LEAPSInstance,
    LELESInstance,
    MaxOutQEAInstance,
    PPIOInstance,
    SeparableInstance,
)

log = structlog.get_logger(__name__)

# Smallest promise gap (s − t or b − a) a reduction is allowed to emit
MIN_PROMISE_GAP = 0.05

# Idle-step counts searched before the parameter search gives up
MAX_IDLE_SEARCH = 2**40

# Calibrated constant in β ≤ κ₃ a⁶
KAPPA_3 = 1.0

# Largest distance threshold emitted by the separable-Hamiltonian map
MAX_SEPARABLE_DISTANCE = 1.0


class Reduction(NamedTuple):
    """An emitted instance and every constant the parameter map used."""

    instance: Any
    constants: dict[str, float]


def smallest_idle_steps(feasible: Callable[[int], bool], start: int = 1) -> int:
    """Smallest L ≥ start with feasible(L), found by doubling and bisection."""
    if feasible(start):
        return start
    high = max(1, start)
    while not feasible(high):
        high *= 2
        if high > MAX_IDLE_SEARCH:
            raise InfeasibleParameterError(f"No idle-step count ≤ {MAX_IDLE_SEARCH} meets the requirements")
    low = max(start, high // 2)
    while high - low > 1:
        middle = (low + high) // 2
        if feasible(middle):
            high = middle
        else:
            low = middle
    return high


def _time_average_error(T: int, L: int) -> float:
    """2T/(T+L+1), the weight of the history state before the circuit has finished."""
    return 2.0 * T / (T + L + 1)


def _clock(channel: ChannelSpec, L: int, encoding: Encoding) -> tuple[ClockHamiltonian, float, str]:
    legal = 2**channel.layout.total_qubits * (channel.T + L + 1)
    if legal > MAX_LEGAL_DIM:
        raise InfeasibleParameterError(
            f"L = {L} needs a legal clock space of dimension {legal}, more than {MAX_LEGAL_DIM}",
            required=L,
        )
    hc = build(channel, ClockConfig(channel.T, L, encoding))
    gap, method = clock_gap(hc)
    return hc, gap, method


def reduce_maxoutqea_to_heles(
    inst: MaxOutQEAInstance, encoding: Encoding = Encoding.KITAEV_3LOCAL
) -> Reduction:
    """
    Map a maximum-output-entropy instance to a high-entropy low-energy one.

    The channel first gets a purified input so that every output is reached
    by a pure input. L is the smallest idle count with
    fannes(2T/N, 2^n_B) ≤ 1/4 and fannes(√(1/L) + 2T/N, 2^n_B) ≤ 1/4,
    N = T+L+1; the emitted instance is (H_Φ, α = 0, β = Δ/L, s = τ + 3/4,
    t = τ + 1/4) over the B | rest cut.

    Returns:
    - Reduction: the HELESInstance and its constants.
    """
    channel = with_purified_input(inst.channel)
    T, dim_b = channel.T, 2**channel.n_b

    def feasible(L: int) -> bool:
        drift = _time_average_error(T, L)
        return (
            fannes_bound(drift, dim_b) <= 0.25
            and fannes_bound(np.sqrt(1.0 / L) + drift, dim_b) <= 0.25
        )

    L = smallest_idle_steps(feasible)
    hc, gap, method = _clock(channel, L, encoding)
    beta = gap / L
    instance = HELESInstance(hc, 0.0, beta, inst.tau + 0.75, inst.tau + 0.25, cut=("B",))
    constants = {
        "L": L,
        "T": T,
        "gap": gap,
        "beta": beta,
        "time_average_error": _time_average_error(T, L),
        "s": instance.s,
        "t": instance.t,
    }
    log.info("reduced maxoutqea to heles", L=L, gap=gap, gap_method=method, beta=beta)
    return Reduction(instance, constants)


def entropy_floor(b: float, n_b: int) -> float:
    """−log₂√(1 − b²/4), the min-entropy of a marginal whose state is b-far from product, capped at n_B."""
    remainder = 1.0 - b * b / 4.0
    if remainder <= 0:
        return float(n_b)
    return float(min(-0.5 * np.log2(remainder), n_b))


def reduce_ppio_to_leles(inst: PPIOInstance, encoding: Encoding = Encoding.KITAEV_3LOCAL) -> Reduction:
    """
    Map a product-isometry-output instance to a low-entropy low-energy one.

    With N = T+L+1 and d_B = 2^n_B the emitted instance is (H_U, α = 0,
    β = Δ/L, s, t) over the B | rest cut, where
    t = fannes(2T/N + a, d_B) and
    s = min(−log₂√(1 − b²/4), n_B) − fannes(2/√L + 2T/N, d_B),
    for the smallest L with s − t ≥ MIN_PROMISE_GAP.

    Returns:
    - Reduction: the LELESInstance and its constants.
    """
    circuit = inst.circuit
    T, n_b = circuit.T, circuit.n_b
    dim_b = 2**n_b
    floor = entropy_floor(inst.b, n_b)

    def thresholds(L: int) -> tuple[float, float]:
        drift = _time_average_error(T, L)
        s = floor - fannes_bound(2.0 / np.sqrt(L) + drift, dim_b)
        t = fannes_bound(drift + inst.a, dim_b)
        return s, t

    def feasible(L: int) -> bool:
        s, t = thresholds(L)
        return s - t >= MIN_PROMISE_GAP

    if floor - fannes_bound(inst.a, dim_b) < MIN_PROMISE_GAP:
        raise InfeasibleParameterError(f"a = {inst.a}, b = {inst.b} leave no entropy gap for any L")
    L = smallest_idle_steps(feasible)
    hc, gap, method = _clock(circuit, L, encoding)
    s, t = thresholds(L)
    beta = gap / L
    instance = LELESInstance(hc, 0.0, beta, s, t, cut=("B",))
    constants = {
        "L": L,
        "T": T,
        "gap": gap,
        "beta": beta,
        "entropy_floor": floor,
        "time_average_error": _time_average_error(T, L),
        "witness_distance": 2.0 / np.sqrt(L) + _time_average_error(T, L),
        "s": s,
        "t": t,
    }
    log.info("reduced ppio to leles", L=L, gap=gap, gap_method=method, s=s, t=t)
    return Reduction(instance, constants)


def _leaps_thresholds(T: int, L: int, a: float, b: float) -> tuple[float, float]:
    drift = _time_average_error(T, L)
    return 2.0 * np.sqrt(drift + a), b**2 / 2.0 - 2.0 / np.sqrt(L) - drift


def leaps_constants(inst: PPIOInstance, L: int, gap: float) -> dict[str, float]:
    """
    Emitted thresholds and calibration constants of the LEAPS map at a fixed L.

    Returns:
    - dict: a′, b′, β = Δ/L, κ₁ = a′√L, κ₂ = βL³ and κ₃.
    """
    a, b = _leaps_thresholds(inst.circuit.T, L, inst.a, inst.b)
    beta = gap / L
    return {
        "a": a,
        "b": b,
        "beta": beta,
        "kappa_1": a * np.sqrt(L),
        "kappa_2": beta * L**3,
        "kappa_3": KAPPA_3,
    }


def reduce_ppio_to_leaps(inst: PPIOInstance, encoding: Encoding = Encoding.KITAEV_3LOCAL) -> Reduction:
    """
    Map a product-isometry-output instance to a low-energy approximate-product one.

    With N = T+L+1 the emitted instance is (H_U, α = 0, β = Δ/L, a′, b′)
    over the B | rest cut, where a′ = 2√(2T/N + a) and
    b′ = b²/2 − 2/√L − 2T/N, for the smallest L with b′ − a′ ≥
    MIN_PROMISE_GAP. The constants κ₁ = a′√L and κ₂ = βL³ are recorded and
    β ≤ κ₃ a′⁶ is enforced.

    Returns:
    - Reduction: the LEAPSInstance and its constants.
    """
    T = inst.circuit.T

    def feasible(L: int) -> bool:
        a, b = _leaps_thresholds(T, L, inst.a, inst.b)
        return b - a >= MIN_PROMISE_GAP

    if inst.b**2 / 2.0 - 2.0 * np.sqrt(inst.a) < MIN_PROMISE_GAP:
        raise InfeasibleParameterError(f"a = {inst.a}, b = {inst.b} leave no distance gap for any L")
    L = smallest_idle_steps(feasible)
    hc, gap, method = _clock(inst.circuit, L, encoding)
    constants = leaps_constants(inst, L, gap)
    a, b, beta = constants["a"], constants["b"], constants["beta"]
    if beta > KAPPA_3 * a**6:
        raise InvalidInstanceError(f"β = {beta:.3e} exceeds κ₃ a⁶ = {KAPPA_3 * a**6:.3e}")

    instance = LEAPSInstance(hc, 0.0, beta, a, b, cut=("B",))
    constants.update({"L": L, "T": T, "gap": gap})
    log.info("reduced ppio to leaps", L=L, gap=gap, gap_method=method, a=a, b=b)
    return Reduction(instance, constants)


def reduce_sepham_to_leaps(inst: SeparableInstance) -> Reduction:
    """
    (H, α, β) ↦ (H, α, β′ = β − ‖H‖∞ b, a = 0, b) with b = (β − α)/(2‖H‖∞).

    b is capped at MAX_SEPARABLE_DISTANCE, which keeps β′ − α ≥ (β − α)/2.
    """
    norm = operator_norm(inst.hamiltonian)
    if norm <= 0:
        raise InvalidInstanceError("‖H‖∞ = 0 leaves no energy scale for the distance threshold")
    b = min((inst.beta - inst.alpha) / (2.0 * norm), MAX_SEPARABLE_DISTANCE)
    beta = inst.beta - norm * b
    instance = LEAPSInstance(inst.hamiltonian, inst.alpha, beta, 0.0, b, cut=inst.cut)
    log.info("reduced separable hamiltonian to leaps", norm=norm, b=b, beta=beta)
    return Reduction(instance, {"norm": norm, "b": b, "beta": beta})


def leaps_containment_map(inst: LEAPSInstance) -> Reduction:
    """
    (H, α, β, a, b) ↦ the separable-Hamiltonian instance (H, α + a‖H‖∞, β).

    A state with energy ≤ α within a of φ_L⊗φ_R gives the product state
    energy ≤ α + a‖H‖∞; every product state is 0-far from product, so in
    the NO case none has energy ≤ β.
    """
    norm = operator_norm(inst.hamiltonian)
    alpha = inst.alpha + inst.a * norm
    if alpha >= inst.beta:
        raise InvalidInstanceError(f"α + a‖H‖∞ = {alpha} does not stay below β = {inst.beta}")
    instance = SeparableInstance(inst.hamiltonian, alpha, inst.beta, cut=inst.cut)
    return Reduction(instance, {"norm": norm, "alpha": alpha})
