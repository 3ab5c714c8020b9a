import sys
import time
from enum import Enum
from pathlib import Path
from typing import Callable, Optional

import click
import structlog
import typer

from app import DEFAULT_RESTARTS, DEFAULT_SEED, DEFAULT_THREADS
from app._logging import configure_logging
from app._report import RunReport, input_hash, render, report_schema
from app.controller import AppController
from app.defaults import AppDefaults
from ch2ham import DEFAULT_SWEEP, Encoding
from problems import InstanceDocument
from qstate import dump_json
from qstate.errors import (
    BudgetExceededError,
    LabError,
    MalformedInputError,
    PromiseViolationError,
)

log = structlog.get_logger(__name__)

# Exit codes beyond the YES/NO/UNDECIDED decision codes
EXIT_MALFORMED = 64
EXIT_BUDGET = 65
EXIT_PROMISE = 66
EXIT_FAILURE = 70

cli = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
    help="Circuit-to-Hamiltonian, entropy and low-energy state problems at desk scale.",
)


class ProblemName(str, Enum):
    heles = "heles"
    leles = "leles"
    leaps = "leaps"
    fea = "fea"
    ppio = "ppio"
    maxoutqea = "maxoutqea"
    cimm = "cimm"
    separable = "separable"


class ReductionName(str, Enum):
    maxoutqea_heles = "maxoutqea-heles"
    ppio_leles = "ppio-leles"
    ppio_leaps = "ppio-leaps"
    sepham_leaps = "sepham-leaps"
    leaps_sepham = "leaps-sepham"


class ExtractorKind(str, Enum):
    pauli = "pauli"
    haar = "haar"


def exit_code_for(exc: Exception) -> int:
    """
    Exit code of a failed run.

    Parameters:
    - exc (Exception): the error that ended the run.

    Returns:
    - int: 64 malformed input or unreadable file, 65 budget, 66 promise
      violation, 70 otherwise.
    """
    if isinstance(exc, (MalformedInputError, OSError)):
        return EXIT_MALFORMED
    if isinstance(exc, BudgetExceededError):
        return EXIT_BUDGET
    if isinstance(exc, PromiseViolationError):
        return EXIT_PROMISE
    return EXIT_FAILURE


def _run(ctx: typer.Context, command: Callable, *inputs: Path):
    """Run one controller method, print its RunReport and exit with its code."""
    defaults: AppDefaults = ctx.obj
    controller = AppController(defaults)
    start = time.perf_counter()
    error = None
    try:
        results, code = command(controller)
    except (LabError, ValueError, OSError) as exc:
        log.error("run failed", error=str(exc), kind=type(exc).__name__)
        results, code, error = {}, exit_code_for(exc), f"{type(exc).__name__}: {exc}"

    hashes = {}
    for path in inputs:
        if path is not None and Path(path).is_file():
            hashes[str(path)] = input_hash(path)
    report = RunReport(
        command=ctx.meta.get("argv", sys.argv[1:]),
        seed=defaults.seed,
        threads=defaults.threads,
        restarts=defaults.restarts,
        inputs=hashes,
        seeds=controller.seeds,
        results=results,
        exit_code=code,
        error=error,
        wall_clock=time.perf_counter() - start,
    )
    typer.echo(render(report))
    raise typer.Exit(code)


def _parse_sweep(value: str) -> list[int]:
    try:
        steps = [int(part) for part in value.split(",") if part.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"expected comma-separated integers, got {value!r}") from exc
    if any(L < 0 for L in steps):
        raise typer.BadParameter("idle-step counts must be non-negative")
    return steps


@cli.callback()
def main(
    ctx: typer.Context,
    seed: int = typer.Option(DEFAULT_SEED, "--seed", min=0, help="Root seed of every random choice."),
    threads: int = typer.Option(DEFAULT_THREADS, "--threads", min=1, help="Worker threads for optimizer restarts."),
    restarts: int = typer.Option(DEFAULT_RESTARTS, "--restarts", min=1, help="Optimizer restarts per search."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr."),
):
    configure_logging(verbose)
    ctx.meta["argv"] = list(ctx.obj) if isinstance(ctx.obj, list) else sys.argv[1:]
    ctx.obj = AppDefaults(seed=seed, threads=threads, restarts=restarts, verbose=verbose)


@cli.command("build-ch2ham")
def build_ch2ham(
    ctx: typer.Context,
    circuit: Path = typer.Argument(..., exists=True, dir_okay=False, help="Circuit JSON."),
    idle: int = typer.Option(0, "--idle", min=0, help="Idle steps L appended to the circuit."),
    encoding: Encoding = typer.Option(Encoding.KITAEV_3LOCAL, "--encoding", help="Clock encoding."),
):
    """Build the clock Hamiltonian of a circuit."""
    _run(ctx, lambda c: c.build_ch2ham(circuit, idle, encoding), circuit)


@cli.command("spectrum")
def spectrum(
    ctx: typer.Context,
    hamiltonian: Path = typer.Argument(..., exists=True, dir_okay=False, help="Hamiltonian or clock JSON."),
    cutoff: Optional[float] = typer.Option(None, "--cutoff", help="Return every eigenvalue up to this energy."),
):
    """Ground energy, gap and low-lying eigenvalues."""
    _run(ctx, lambda c: c.spectrum(hamiltonian, cutoff), hamiltonian)


@cli.command("gibbs")
def gibbs(
    ctx: typer.Context,
    hamiltonian: Path = typer.Argument(..., exists=True, dir_okay=False),
    beta: float = typer.Option(..., "--beta", min=0.0, help="Inverse temperature."),
):
    """The Gibbs state e^{-βH}/Z."""
    _run(ctx, lambda c: c.gibbs(hamiltonian, beta), hamiltonian)


@cli.command("free-energy")
def free_energy(
    ctx: typer.Context,
    hamiltonian: Path = typer.Argument(..., exists=True, dir_okay=False),
    beta: float = typer.Option(..., "--beta", min=0.0, help="Inverse temperature, > 0."),
):
    """F = -(1/β) ln Z."""
    _run(ctx, lambda c: c.free_energy(hamiltonian, beta), hamiltonian)


@cli.command("verify-history")
def verify_history(
    ctx: typer.Context,
    clock: Path = typer.Argument(..., exists=True, dir_okay=False, help="Clock JSON or build-ch2ham report."),
    state: str = typer.Argument("random", help="'random', 'basis:<index>' or a state JSON on A."),
):
    """Energy of the history state of an input."""
    _run(ctx, lambda c: c.verify_history(clock, state), clock, Path(state))


@cli.command("certify-gap")
def certify_gap(
    ctx: typer.Context,
    circuit: Path = typer.Argument(..., exists=True, dir_okay=False),
    sweep: str = typer.Option(",".join(str(L) for L in DEFAULT_SWEEP), "--sweep", help="Comma-separated L values."),
    idle: int = typer.Option(0, "--idle", min=0),
    encoding: Encoding = typer.Option(Encoding.KITAEV_3LOCAL, "--encoding"),
):
    """Gap of H_Φ and its fitted scaling over a sweep of L."""
    steps = _parse_sweep(sweep)
    _run(ctx, lambda c: c.certify_gap(circuit, steps, idle, encoding), circuit)


@cli.command("entropy-protocol")
def entropy_protocol(
    ctx: typer.Context,
    state: Path = typer.Option(..., "--input", exists=True, dir_okay=False, help="ρ on A or A, B."),
    extractor_seed: int = typer.Option(0, "--extractor-seed", min=0),
    q: int = typer.Option(1, "--q", min=1, help="Copies of ρ."),
    eps: float = typer.Option(1e-6, "--eps", min=0.0, help="Flattening error ε."),
    tau: Optional[float] = typer.Option(None, "--tau", help="Entropy target in bits; n_A by default."),
    s: Optional[float] = typer.Option(None, "--s", help="Soundness threshold; 0.9·c by default."),
    delta_prime: float = typer.Option(0.25, "--delta-prime", help="Entropy slack δ′."),
    delta: Optional[float] = typer.Option(None, "--delta", min=0.0, help="Allowed ‖σ̃ − ρ‖₁; 4(3ε)^¼ by default."),
    kind: ExtractorKind = typer.Option(ExtractorKind.pauli, "--extractor"),
):
    """Run the entropy verification protocol with the honest prover."""
    _run(
        ctx,
        lambda c: c.entropy_protocol(state, extractor_seed, q, eps, tau, s, delta_prime, kind.value, delta),
        state,
    )


@cli.command("decide")
def decide(
    ctx: typer.Context,
    problem: ProblemName = typer.Argument(...),
    instance: Path = typer.Argument(..., exists=True, dir_okay=False),
):
    """Decide an instance: exit 0 YES, 1 NO, 2 UNDECIDED."""
    _run(ctx, lambda c: c.decide(problem.value, instance), instance)


@cli.command("reduce")
def reduce(
    ctx: typer.Context,
    mapping: ReductionName = typer.Argument(...),
    instance: Path = typer.Argument(..., exists=True, dir_okay=False),
    run_decider: bool = typer.Option(False, "--decide", help="Also decide the emitted instance."),
):
    """Map an instance to its image under a reduction."""
    _run(ctx, lambda c: c.reduce(mapping.value, instance, run_decider), instance)


@cli.command("schema")
def schema():
    """Print the JSON schemas of the run report and of instance files."""
    document = {"run_report": report_schema(), "instance": InstanceDocument.model_json_schema()}
    typer.echo(dump_json(document).decode())


def cli_dispatch(argv: list[str] | None = None) -> int:
    """
    Run the CLI on `argv` and return its exit code.

    Usage errors exit with 64 after printing click's message on stderr.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code = cli(args=argv, prog_name="qlab", standalone_mode=False, obj=argv)
    except click.UsageError as exc:
        exc.show()
        return EXIT_MALFORMED
    except click.exceptions.Abort:
        return EXIT_FAILURE
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(cli_dispatch())
