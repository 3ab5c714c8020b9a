from pathlib import Path
from typing import Any, Callable

import numpy as np
import structlog
from pydantic import ValidationError

from ch2ham import (
    ClockConfig,
    ClockHamiltonian,
    Encoding,
    build,
    certify_gap,
    clock_gap,
    history_state,
)
from channels import apply_channel, channel_from_document, channel_to_document, load_channel
from entropy_protocol import (
    ProtocolConfig,
    completeness,
    honest_prover_state,
    make_extractor,
    run_protocol,
)
from hamiltonian import (
    energy,
    free_energy,
    free_energy_functional,
    gibbs_state,
    hamiltonian_from_document,
    log_partition_function,
    spectrum,
)
from problems import (
    CIMMInstance,
    Decision,
    FEAInstance,
    HELESInstance,
    LEAPSInstance,
    LELESInstance,
    MaxOutQEAInstance,
    PPIOInstance,
    SeparableInstance,
    decide_cimm,
    decide_fea_exact,
    decide_heles,
    decide_leaps,
    decide_leles,
    decide_maxoutqea,
    decide_ppio,
    decide_separable,
    instance_to_document,
    leaps_containment_map,
    load_instance,
    reduce_maxoutqea_to_heles,
    reduce_ppio_to_leaps,
    reduce_ppio_to_leles,
    reduce_sepham_to_leaps,
    verdict_to_document,
    verify_witness,
)
from qstate import (
    MAX_DENSE_QUBITS,
    RegisterLayout,
    as_density,
    basis_state,
    partial_trace,
    random_pure_state,
    read_json,
    state_from_document,
    state_to_document,
    trace_norm_distance,
    vn_entropy,
)
from qstate.errors import BudgetExceededError, MalformedInputError

from .defaults import AppDefaults

log = structlog.get_logger(__name__)

# Largest history-state energy accepted by verify-history
HISTORY_RESIDUAL_TOL = 1e-9

# Instance type expected by each `decide` problem
DECIDE_PROBLEMS = {
    "heles": HELESInstance,
    "leles": LELESInstance,
    "leaps": LEAPSInstance,
    "fea": FEAInstance,
    "ppio": PPIOInstance,
    "maxoutqea": MaxOutQEAInstance,
    "cimm": CIMMInstance,
    "separable": SeparableInstance,
}

# Source instance type and parameter map of each `reduce` mapping
REDUCTIONS = {
    "maxoutqea-heles": (MaxOutQEAInstance, reduce_maxoutqea_to_heles),
    "ppio-leles": (PPIOInstance, reduce_ppio_to_leles),
    "ppio-leaps": (PPIOInstance, reduce_ppio_to_leaps),
    "sepham-leaps": (SeparableInstance, reduce_sepham_to_leaps),
    "leaps-sepham": (LEAPSInstance, leaps_containment_map),
}

CommandResult = tuple[dict[str, Any], int]


def _clock_from_document(data: dict) -> ClockHamiltonian:
    """Build H_Φ from {"circuit", "L", "encoding"}, or from a build-ch2ham run report."""
    if "results" in data:
        data = data["results"].get("clock", {})
    if "circuit" not in data or "L" not in data:
        raise MalformedInputError("A clock document needs circuit and L")
    channel = channel_from_document(data["circuit"])
    try:
        L = int(data["L"])
        encoding = Encoding(data.get("encoding", Encoding.KITAEV_3LOCAL.value))
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"Invalid clock document: {exc}") from exc
    return build(channel, ClockConfig(channel.T, L, encoding))


def _load_operator(path: str | Path):
    """A LocalHamiltonian document, or a clock document built into its legal view."""
    data = read_json(path)
    if isinstance(data, dict) and ("circuit" in data or "results" in data):
        return _clock_from_document(data)
    hamiltonian, _ = hamiltonian_from_document(data)
    return hamiltonian


def _check_dense(hamiltonian):
    if hamiltonian.layout.dim > 2**MAX_DENSE_QUBITS:
        raise BudgetExceededError(
            f"Dense thermal quantities on dimension {hamiltonian.layout.dim} exceed 2^{MAX_DENSE_QUBITS}"
        )


class AppController:
    """
    The AppController class binds the command-line subcommands to the
    library. Every method returns the results dictionary of the run report
    together with the exit code of the run; seeds are drawn from the
    AppDefaults given at construction.
    """

    def __init__(self, defaults: AppDefaults | None = None):
        """
        Initialize the AppController with a run configuration.

        Parameters:
        - defaults (AppDefaults): seed, threads and restarts of the run.
        """
        self._defaults = defaults or AppDefaults()
        self._seeds: list[int] = []

    @property
    def seeds(self) -> list[int]:
        """Every seed handed out so far, in order."""
        return list(self._seeds)

    def _seed(self) -> int:
        seed = self._defaults.child_seed()
        self._seeds.append(seed)
        return seed

    def build_ch2ham(self, circuit: Path, idle: int, encoding: Encoding) -> CommandResult:
        """
        Build the clock Hamiltonian of a circuit.

        Parameters:
        - circuit (Path): circuit JSON.
        - idle (int): idle steps L.
        - encoding (Encoding): clock encoding.

        Returns:
        - tuple: sizes of both views and the clock document that rebuilds it.
        """
        channel = load_channel(circuit)
        hc = build(channel, ClockConfig(channel.T, idle, encoding))
        results = {
            "clock": {"circuit": channel_to_document(channel), "L": idle, "encoding": encoding.value},
            "T": channel.T,
            "L": idle,
            "time_steps": hc.time_steps,
            "work_qubits": hc.work_qubits,
            "clock_qubits": hc.clock_qubits,
            "qubits": hc.qubit_layout.total_qubits,
            "legal_dimension": hc.layout.dim,
            "terms": hc.base.n_terms,
        }
        return results, 0

    def spectrum(self, hamiltonian: Path, cutoff: float | None) -> CommandResult:
        """
        Low-lying spectrum of a Hamiltonian or clock document.

        Returns:
        - tuple: ground energy, gap, eigenvalues and the eigensolver used.
        """
        operator = _load_operator(hamiltonian)
        summary = spectrum(operator, cutoff)
        results = {
            "ground_energy": summary.ground_energy,
            "gap": summary.gap,
            "eigenvalues": np.asarray(summary.eigenvalues, dtype=float),
            "cutoff": summary.cutoff,
            "low_energy_dimension": summary.low_energy_dimension,
            "method": summary.method,
        }
        return results, 0

    def gibbs(self, hamiltonian: Path, beta: float) -> CommandResult:
        """
        The Gibbs state e^{−βH}/Z and its thermal quantities.
        """
        operator = _load_operator(hamiltonian)
        _check_dense(operator)
        rho = gibbs_state(operator, beta)
        results = {
            "beta": beta,
            "log_partition_function": log_partition_function(operator, beta),
            "energy": energy(operator, rho),
            "entropy_bits": vn_entropy(rho),
            "state": state_to_document(rho),
        }
        if beta > 0:
            results["free_energy"] = free_energy(operator, beta)
        return results, 0

    def free_energy(self, hamiltonian: Path, beta: float) -> CommandResult:
        """
        F = −(1/β) ln Z, checked against the functional f(ρ) at the Gibbs state.
        """
        operator = _load_operator(hamiltonian)
        _check_dense(operator)
        value = free_energy(operator, beta)
        functional = free_energy_functional(operator, gibbs_state(operator, beta), beta)
        results = {
            "beta": beta,
            "free_energy": value,
            "log_partition_function": log_partition_function(operator, beta),
            "functional_at_gibbs": functional,
            "residual": abs(value - functional),
        }
        return results, 0

    def _input_state(self, spec: str, n_a: int):
        layout = RegisterLayout([("A", n_a)])
        if spec == "random":
            return random_pure_state(layout, np.random.default_rng(self._seed()))
        if spec.startswith("basis:"):
            index = spec.removeprefix("basis:")
            try:
                return basis_state(layout, int(index) if index.isdigit() else index)
            except (ValueError, IndexError) as exc:
                raise MalformedInputError(f"Invalid basis state {spec!r}: {exc}") from exc
        state = state_from_document(read_json(spec))
        if state.layout != layout:
            raise MalformedInputError(f"Input state on {state.layout}, the circuit needs {layout}")
        return state

    def verify_history(self, clock: Path, state: str) -> CommandResult:
        """
        Energy of the history state of an input, and how close its B marginal is to Φ(ψ).

        Parameters:
        - clock (Path): clock document or build-ch2ham report.
        - state (str): "random", "basis:<index or bits>" or a state JSON path on A.

        Returns:
        - tuple: the energy residual, exit 0 when it is ≤ 1e-9.
        """
        hc = _clock_from_document(read_json(clock))
        psi = self._input_state(state, hc.channel.n_a)
        if not hasattr(psi, "amplitudes"):
            raise MalformedInputError("verify-history needs a pure input state")
        history = history_state(hc, psi)
        residual = abs(energy(hc, history))
        results = {"energy_residual": residual, "time_steps": hc.time_steps}
        if hc.qubit_layout.total_qubits <= MAX_DENSE_QUBITS:
            results["qubit_energy_residual"] = abs(energy(hc.base, hc.embed(history)))
            residual = max(residual, results["qubit_energy_residual"])

        output = apply_channel(hc.channel, psi)
        distance = trace_norm_distance(partial_trace(history, "B"), output)
        results["output_distance"] = distance
        results["output_bound"] = 2.0 * hc.config.T / hc.time_steps
        log.info("history verified", residual=residual, distance=distance)
        return results, 0 if residual <= HISTORY_RESIDUAL_TOL else 1

    def certify_gap(self, circuit: Path, sweep: list[int], idle: int, encoding: Encoding) -> CommandResult:
        """
        Gap of H_Φ at `idle` and the fitted scaling of Δ over the sweep.

        Returns:
        - tuple: gap, fitted exponent and constant, the sweep rows; exit 0
          when the exponent is consistent with Δ = Ω((T+L+1)^-3).
        """
        channel = load_channel(circuit)
        hc = build(channel, ClockConfig(channel.T, idle, encoding))
        certificate = certify_gap(hc, sweep, progress=True)
        _, method = clock_gap(hc)
        results = {
            "gap": certificate.gap,
            "method": method,
            "fits_scaling": certificate.fits_scaling,
            "exponent": certificate.sweep.exponent,
            "constant": certificate.sweep.constant,
            "sweep": certificate.sweep.to_records(),
        }
        return results, 0 if certificate.fits_scaling else 1

    def entropy_protocol(
        self,
        state: Path,
        extractor_seed: int,
        q: int,
        epsilon: float,
        tau: float | None = None,
        s: float | None = None,
        delta_prime: float = 0.25,
        kind: str = "pauli",
        delta: float | None = None,
    ) -> CommandResult:
        """
        Run the entropy verification protocol with the honest prover on ρ_AB.

        Parameters:
        - state (Path): ρ on A or on A, B.
        - extractor_seed (int): seed of the Haar extractor.
        - q (int): copies.
        - epsilon (float): flattening error.
        - tau (float, optional): entropy target; defaults to n_A bits.
        - s (float, optional): soundness threshold; defaults to 0.9·c.
        - delta_prime (float): entropy slack.
        - kind (str): "pauli" for the exact Pauli twirl, "haar" for a random-unitary mixture.
        - delta (float, optional): allowed ‖σ̃ − ρ‖₁; defaults to 4(3ε)^{1/4}.

        Returns:
        - tuple: acceptance probability, entropy certificate and ‖σ̃ − ρ‖₁;
          exit 0 when the prover is accepted.
        """
        rho = as_density(state_from_document(read_json(state)))
        if "A" not in rho.layout:
            raise MalformedInputError(f"The protocol input needs a register A, got {rho.layout}")
        n_a = rho.layout.register("A").qubits
        n = q * n_a
        extractor = make_extractor(n, 2 * n, seed=extractor_seed, kind=kind)
        c = completeness(epsilon)
        try:
            config = ProtocolConfig(
                tau=float(n_a) if tau is None else tau,
                q=q,
                epsilon=epsilon,
                delta=4.0 * (3.0 * epsilon) ** 0.25 if delta is None else delta,
                delta_prime=delta_prime,
                s=0.9 * c if s is None else s,
                n_a=n_a,
            )
        except ValidationError as exc:
            raise MalformedInputError(f"Invalid protocol parameters: {exc}") from exc
        prover = honest_prover_state(rho, extractor, q)
        result = run_protocol(prover.state, extractor, config, reference=rho)
        results = {
            **result.transcript(),
            "accepted": result.accepted,
            "certificate_holds": result.certificate_holds,
            "certified_bound": result.certified_bound,
            "extractor": {"kind": extractor.kind, "n": extractor.n, "d": extractor.d, "epsilon": extractor.epsilon},
            "prover_alignment_residual": prover.residual,
        }
        if result.output_distance is not None:
            results["output_distance"] = result.output_distance
            results["output_within_delta"] = result.output_within_delta
        return results, 0 if result.accepted else 1

    def _decider(self, inst) -> Callable:
        defaults = self._defaults
        deciders = {
            HELESInstance: decide_heles,
            LELESInstance: decide_leles,
            LEAPSInstance: decide_leaps,
            PPIOInstance: decide_ppio,
            MaxOutQEAInstance: decide_maxoutqea,
            CIMMInstance: decide_cimm,
            SeparableInstance: decide_separable,
        }
        if isinstance(inst, FEAInstance):
            return decide_fea_exact
        decider = deciders[type(inst)]
        seed = self._seed()
        return lambda i: decider(i, defaults.restarts, seed, defaults.threads)

    def _verdict(self, inst) -> CommandResult:
        verdict = self._decider(inst)(inst)
        results = verdict_to_document(verdict)
        if verdict.decision is Decision.YES and verdict.witness is not None:
            results["witness_verified"] = verify_witness(inst, verdict)
        return results, verdict.decision.exit_code

    def decide(self, problem: str, instance: Path) -> CommandResult:
        """
        Decide an instance file of the named problem.

        Returns:
        - tuple: the verdict document; exit 0/1/2 for YES/NO/UNDECIDED.
        """
        inst = load_instance(instance)
        expected = DECIDE_PROBLEMS[problem]
        if not isinstance(inst, expected):
            raise MalformedInputError(f"decide {problem} needs a {problem} instance, got {type(inst).__name__}")
        return self._verdict(inst)

    def reduce(self, mapping: str, instance: Path, decide: bool = False) -> CommandResult:
        """
        Apply a reduction to an instance file.

        Parameters:
        - mapping (str): one of REDUCTIONS.
        - instance (Path): the source instance.
        - decide (bool): also decide the emitted instance.

        Returns:
        - tuple: the emitted instance and constants; with `decide`, the
          verdict and its exit code, otherwise exit 0.
        """
        source, reduction = REDUCTIONS[mapping]
        inst = load_instance(instance)
        if not isinstance(inst, source):
            raise MalformedInputError(f"reduce {mapping} needs a {source.__name__}, got {type(inst).__name__}")
        emitted = reduction(inst)
        results = {"instance": instance_to_document(emitted.instance), "constants": emitted.constants}
        if not decide:
            return results, 0
        verdict, code = self._verdict(emitted.instance)
        results["verdict"] = verdict
        return results, code
