from typing import Iterable, NamedTuple

import numpy as np
import pandas as pd
import progressbar
import structlog

from channels import ChannelSpec
from hamiltonian import energy, spectrum
from qstate import ATOL, MAX_DENSE_QUBITS, ZERO_PROBABILITY, DensityMatrix, PureState, RegisterLayout
from qstate.errors import InvalidStateError, LayoutError, ZeroProbabilityError

from ._build import ClockHamiltonian, build
from ._clock import ClockConfig, Encoding
from ._history import history_basis

log = structlog.get_logger(__name__)

DEFAULT_SWEEP = (0, 2, 4, 8, 16)

# Smallest accepted gap exponent in Δ ∝ (T+L+1)^exponent
SCALING_EXPONENT_FLOOR = -3.25

# Every clock string containing "01" costs at least this much
ILLEGAL_FLOOR = 1.0

widgets = [
    "Gap sweep",
    " ",
    progressbar.SimpleProgress(),
    " ",
    progressbar.Bar(),
    " ",
    progressbar.AdaptiveETA(),
]


def clock_gap(hc: ClockHamiltonian) -> tuple[float, str]:
    """
    Spectral gap of H_Φ.

    The full unary instance is diagonalised densely when it fits
    MAX_DENSE_QUBITS. Otherwise the gap is the legal-block gap, capped by the
    energy floor of illegal clock strings.

    Returns:
    - tuple: (Δ, method)
    """
    if hc.qubit_layout.total_qubits <= MAX_DENSE_QUBITS:
        return spectrum(hc.base).gap, "dense"

    gap = spectrum(hc).gap
    if hc.clock_qubits >= 2:
        gap = min(gap, ILLEGAL_FLOOR)
    return gap, "legal-blocks"


class GapSweep:
    """Gaps of one circuit over a range of idle-step counts, with a log-log fit."""

    def __init__(self, df: pd.DataFrame):
        self._df = df
        self._slope, self._intercept = np.polyfit(
            np.log(df["time_steps"].to_numpy(dtype=float)),
            np.log(df["gap"].to_numpy(dtype=float)),
            1,
        )

    @property
    def dataframe(self) -> pd.DataFrame:
        return self._df

    @property
    def exponent(self) -> float:
        """Fitted e in Δ ≈ c (T+L+1)^e."""
        return float(self._slope)

    @property
    def constant(self) -> float:
        """Fitted c in Δ ≈ c (T+L+1)^e."""
        return float(np.exp(self._intercept))

    @property
    def fits_scaling(self) -> bool:
        return self.exponent >= SCALING_EXPONENT_FLOOR

    def to_records(self) -> list[dict]:
        return self._df.to_dict(orient="records")


def gap_sweep(
    channel: ChannelSpec,
    idle_steps: Iterable[int] = DEFAULT_SWEEP,
    encoding: Encoding = Encoding.KITAEV_3LOCAL,
    progress: bool = False,
) -> GapSweep:
    """
    Measure Δ for a fixed circuit and several L.

    Parameters:
    - channel (ChannelSpec): the circuit; needs at least two distinct T+L+1 values.
    - idle_steps: the L values.
    - encoding (Encoding): clock encoding.
    - progress (bool): show a progress bar on stderr.

    Returns:
    - GapSweep: one row per L.
    """
    values = sorted(set(int(L) for L in idle_steps))
    if channel.T == 0 and 0 in values:
        values.remove(0)
    if len(values) < 2:
        raise ValueError(f"A gap sweep needs two idle-step counts, got {values}")

    bar = progressbar.ProgressBar(max_value=len(values), widgets=widgets) if progress else None
    rows = []
    for i, L in enumerate(values):
        hc = build(channel, ClockConfig(channel.T, L, encoding))
        gap, method = clock_gap(hc)
        rows.append({"L": L, "time_steps": hc.time_steps, "gap": gap, "method": method})
        if bar is not None:
            bar.update(i + 1)
    if bar is not None:
        bar.finish()

    sweep = GapSweep(pd.DataFrame(rows))
    log.info("gap sweep", exponent=sweep.exponent, constant=sweep.constant)
    return sweep


class GapCertificate(NamedTuple):
    gap: float
    fits_scaling: bool
    sweep: GapSweep


def certify_gap(
    hc: ClockHamiltonian,
    sweep: Iterable[int] = DEFAULT_SWEEP,
    progress: bool = False,
) -> GapCertificate:
    """
    Gap of `hc` and whether its circuit shows Δ = Ω((T+L+1)^-3) over a sweep of L.

    Returns:
    - GapCertificate: (Δ, fits_scaling, sweep)
    """
    gap, method = clock_gap(hc)
    result = gap_sweep(hc.channel, sweep, hc.config.encoding, progress)
    log.info("gap certified", gap=gap, method=method, exponent=result.exponent)
    return GapCertificate(gap, result.fits_scaling, result)


class WitnessExtraction(NamedTuple):
    sigma: DensityMatrix
    bound: float
    weight: float


def extract_witness(
    hc: ClockHamiltonian,
    rho: PureState | DensityMatrix,
    beta: float,
    gap: float | None = None,
) -> WitnessExtraction:
    """
    Read a channel input off a low-energy state.

    Projects ρ onto the history subspace, renormalises, and expresses the
    result in the history basis, which gives σ_A directly.

    Parameters:
    - hc (ClockHamiltonian): the clock Hamiltonian.
    - rho: a legal-view state with Tr(Hρ) ≤ β.
    - beta (float): the energy bound.
    - gap (float, optional): Δ; computed with clock_gap when omitted.

    Returns:
    - WitnessExtraction: σ_A (pure if ρ is pure), the bound
      2√(β/Δ) + 2T/(T+L+1) on ‖ρ_B − Φ(σ)‖₁, and Tr(Πρ).
    """
    if rho.layout != hc.layout:
        raise LayoutError(f"Expected a legal-view state on {hc.layout}, got {rho.layout}")
    value = energy(hc, rho)
    if value > beta + ATOL:
        raise InvalidStateError(f"State energy {value} exceeds β = {beta}")

    basis = history_basis(hc)
    if isinstance(rho, PureState):
        coefficients = basis.conj().T @ rho.amplitudes
        eta = np.outer(coefficients, coefficients.conj())
    else:
        eta = basis.conj().T @ rho.matrix @ basis
    weight = float(np.trace(eta).real)
    if weight <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"History subspace weight {weight} is zero")

    if gap is None:
        gap, _ = clock_gap(hc)
    bound = 2 * np.sqrt(max(beta, 0.0) / gap) + 2 * hc.config.T / hc.time_steps

    sigma = DensityMatrix(RegisterLayout([("A", hc.channel.n_a)]), eta / weight, validate=False)
    log.debug("witness extracted", weight=weight, bound=bound)
    return WitnessExtraction(sigma, float(bound), weight)
