import numpy as np
import orjson
import pytest

from channels import ChannelSpec, channel_to_document, random_channel
from hamiltonian import PAULI_Z, LocalHamiltonian, LocalTerm, hamiltonian_to_document, heisenberg_pair
from main import cli_dispatch, exit_code_for
from problems import FEAInstance, HELESInstance, SeparableInstance, instance_to_document
from qstate import RegisterLayout, bell_state, dump_json, state_to_document
from qstate.errors import (
    BudgetExceededError,
    InfeasibleParameterError,
    LabError,
    MalformedInputError,
    PromiseViolationError,
)

AB = RegisterLayout([("A", 1), ("B", 1)])


def _write(path, document):
    path.write_bytes(dump_json(document))
    return str(path)


def _run(capsys, *argv):
    code = cli_dispatch(list(argv))
    out = capsys.readouterr().out
    return code, (orjson.loads(out) if out.strip() else None)


def _zero_hamiltonian() -> LocalHamiltonian:
    return LocalHamiltonian(RegisterLayout([("A", 2)]), [LocalTerm([0], np.zeros((2, 2)))])


def _heisenberg() -> LocalHamiltonian:
    return LocalHamiltonian(AB, [heisenberg_pair(AB)])


@pytest.fixture
def circuit(tmp_path):
    channel = random_channel(1, 1, 2, np.random.default_rng(4))
    return _write(tmp_path / "circuit.json", channel_to_document(channel))


def test_exit_codes_by_error_type():
    assert exit_code_for(MalformedInputError("x")) == 64
    assert exit_code_for(FileNotFoundError("x")) == 64
    assert exit_code_for(BudgetExceededError("x")) == 65
    assert exit_code_for(InfeasibleParameterError("x", required=10)) == 65
    assert exit_code_for(PromiseViolationError("x")) == 66
    assert exit_code_for(LabError("x")) == 70
    assert exit_code_for(ValueError("x")) == 70
    assert exit_code_for(RuntimeError("x")) == 70


def test_decide_fea_yes(tmp_path, capsys):
    path = _write(tmp_path / "fea.json", instance_to_document(FEAInstance(_zero_hamiltonian(), 1.0, -1.3, -1.0)))
    code, report = _run(capsys, "decide", "fea", path)
    assert code == 0
    assert report["exit_code"] == 0
    assert report["results"]["decision"] == "YES"
    assert report["results"]["value"] == pytest.approx(-2 * np.log(2))
    assert report["results"]["witness_verified"] is True
    assert report["inputs"][path].startswith("sha256:")
    assert report["command"] == ["decide", "fea", path]


def test_decide_reports_undecided(tmp_path, capsys):
    path = _write(tmp_path / "fea.json", instance_to_document(FEAInstance(_zero_hamiltonian(), 1.0, -1.5, -1.0)))
    code, report = _run(capsys, "decide", "fea", path)
    assert code == 2
    assert report["results"]["decision"] == "UNDECIDED"


def test_decide_rejects_an_instance_of_another_problem(tmp_path, capsys):
    path = _write(tmp_path / "fea.json", instance_to_document(FEAInstance(_zero_hamiltonian(), 1.0, -1.3, -1.0)))
    code, report = _run(capsys, "decide", "heles", path)
    assert code == 64
    assert report["error"].startswith("MalformedInputError")
    assert report["results"] == {}


def test_malformed_json_exits_64(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{oops")
    code, report = _run(capsys, "spectrum", str(path))
    assert code == 64
    assert report["exit_code"] == 64


def test_usage_errors_exit_64(tmp_path, capsys):
    assert cli_dispatch(["spectrum", str(tmp_path / "missing.json")]) == 64
    assert cli_dispatch(["no-such-command"]) == 64
    assert cli_dispatch(["decide", "bogus", str(tmp_path)]) == 64
    capsys.readouterr()


def test_oversized_clock_exits_65(tmp_path, capsys):
    path = _write(tmp_path / "wide.json", channel_to_document(ChannelSpec(3, 3)))
    code, report = _run(capsys, "build-ch2ham", path, "--idle", "70")
    assert code == 65
    assert "BudgetExceededError" in report["error"]


def test_spectrum_and_free_energy(tmp_path, capsys):
    path = _write(tmp_path / "h.json", hamiltonian_to_document(_heisenberg()))
    code, report = _run(capsys, "spectrum", path, "--cutoff", "0")
    assert code == 0
    assert report["results"]["ground_energy"] == pytest.approx(-3.0)
    assert report["results"]["gap"] == pytest.approx(4.0)
    assert report["results"]["low_energy_dimension"] == 1

    zero = _write(tmp_path / "zero.json", hamiltonian_to_document(_zero_hamiltonian()))
    code, report = _run(capsys, "free-energy", zero, "--beta", "1")
    assert code == 0
    assert report["results"]["free_energy"] == pytest.approx(-2 * np.log(2))
    assert report["results"]["residual"] <= 1e-8


def test_gibbs_state_is_reported(tmp_path, capsys):
    z = LocalHamiltonian(RegisterLayout([("A", 1)]), [LocalTerm([0], PAULI_Z)])
    path = _write(tmp_path / "z.json", hamiltonian_to_document(z))
    code, report = _run(capsys, "gibbs", path, "--beta", "1")
    assert code == 0
    assert report["results"]["energy"] == pytest.approx(-np.tanh(1.0))
    assert report["results"]["state"]["registers"] == [["A", 1]]


def test_built_clock_feeds_verify_history(tmp_path, capsys, circuit):
    code, built = _run(capsys, "build-ch2ham", circuit, "--idle", "2", "--encoding", "unary")
    assert code == 0
    assert built["results"]["time_steps"] == 5
    assert built["results"]["qubits"] == 8
    clock = _write(tmp_path / "clock.json", built)

    code, report = _run(capsys, "--seed", "5", "verify-history", clock)
    assert code == 0
    results = report["results"]
    assert results["energy_residual"] <= 1e-9
    assert results["qubit_energy_residual"] <= 1e-9
    assert results["output_distance"] <= results["output_bound"] + 1e-9
    assert len(report["seeds"]) == 1

    code, report = _run(capsys, "verify-history", clock, "basis:1")
    assert code == 0
    assert report["seeds"] == []


def test_spectrum_of_a_clock_document_uses_legal_blocks(tmp_path, capsys, circuit):
    _, built = _run(capsys, "build-ch2ham", circuit, "--idle", "16")
    clock = _write(tmp_path / "clock.json", built)
    code, report = _run(capsys, "spectrum", clock)
    assert code == 0
    assert report["results"]["method"] == "legal-blocks"
    assert report["results"]["ground_energy"] == pytest.approx(0.0, abs=1e-9)


def test_certify_gap_sweep(capsys, circuit):
    code, report = _run(capsys, "certify-gap", circuit, "--sweep", "0,2,4,8,16")
    assert code == 0
    results = report["results"]
    assert -3.25 <= results["exponent"] <= -1.75
    assert results["fits_scaling"] is True
    assert [row["L"] for row in results["sweep"]] == [0, 2, 4, 8, 16]


def test_certify_gap_rejects_a_bad_sweep(capsys, circuit):
    assert cli_dispatch(["certify-gap", circuit, "--sweep", "0,x"]) == 64
    capsys.readouterr()


def test_entropy_protocol_accepts_the_honest_prover(tmp_path, capsys):
    path = _write(tmp_path / "bell.json", state_to_document(bell_state().density()))
    code, report = _run(capsys, "entropy-protocol", "--input", path, "--q", "2")
    assert code == 0
    results = report["results"]
    assert results["accepted"] is True
    assert results["accept_probability"] >= 0.99
    assert results["output_distance"] <= 0.05
    assert results["extractor"]["d"] == 4
    assert results["certificate_holds"] is True
    assert results["output_within_delta"] is True
    assert results["output_closeness"]["delta"] == pytest.approx(4 * (3e-6) ** 0.25)


def test_entropy_protocol_with_a_tight_delta(tmp_path, capsys):
    path = _write(tmp_path / "bell.json", state_to_document(bell_state().density()))
    code, report = _run(capsys, "entropy-protocol", "--input", path, "--q", "1", "--delta", "1e-12")
    assert code == 0
    assert report["results"]["output_closeness"]["delta"] == pytest.approx(1e-12)


def test_entropy_protocol_rejects_an_impossible_threshold(tmp_path, capsys):
    path = _write(tmp_path / "bell.json", state_to_document(bell_state().density()))
    code, report = _run(capsys, "entropy-protocol", "--input", path, "--q", "2", "--s", "0.9999")
    assert code == 64
    assert report["error"].startswith("MalformedInputError")


def test_reduce_with_decide(tmp_path, capsys):
    zz = LocalHamiltonian(AB, [LocalTerm([0, 1], np.kron(PAULI_Z, PAULI_Z))])
    path = _write(tmp_path / "sep.json", instance_to_document(SeparableInstance(zz, -0.9, -0.5)))
    code, report = _run(capsys, "--restarts", "4", "reduce", "sepham-leaps", path, "--decide")
    assert code == 0
    results = report["results"]
    assert results["instance"]["problem"] == "leaps"
    assert results["constants"]["b"] == pytest.approx(0.2)
    assert results["verdict"]["decision"] == "YES"

    code, report = _run(capsys, "reduce", "sepham-leaps", path)
    assert code == 0
    assert "verdict" not in report["results"]


def test_schema_lists_report_and_instance_schemas(capsys):
    code, document = _run(capsys, "schema")
    assert code == 0
    assert "exit_code" in document["run_report"]["properties"]
    assert "problem" in document["instance"]["properties"]


def test_reports_are_reproducible_from_the_seed(tmp_path, capsys):
    path = _write(tmp_path / "heles.json", instance_to_document(HELESInstance(_heisenberg(), -2.5, -1.0, 0.9, 0.2)))
    argv = ["--seed", "7", "--restarts", "4", "decide", "heles", path]
    first_code, first = _run(capsys, *argv)
    second_code, second = _run(capsys, *argv)
    assert first_code == second_code == 0
    first.pop("wall_clock")
    second.pop("wall_clock")
    assert first == second
