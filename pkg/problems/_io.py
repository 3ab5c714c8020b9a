from functools import singledispatch
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from ch2ham import ClockConfig, ClockHamiltonian, Encoding, build
from channels import channel_from_document, channel_to_document
from hamiltonian import hamiltonian_from_document, hamiltonian_to_document
from qstate import parse_document, read_json, state_to_document
from qstate.errors import BudgetExceededError, LabError, MalformedInputError

from ._instances import (
    CIMMInstance,
    FEAInstance,
    HELESInstance,
    LEAPSInstance,
    LELESInstance,
    MaxOutQEAInstance,
    PPIOInstance,
    SeparableInstance,
    Verdict,
)

Problem = Literal["heles", "leles", "leaps", "fea", "ppio", "maxoutqea", "cimm", "separable"]


class ClockDocument(BaseModel):
    """A clock Hamiltonian stored as the circuit it is built from."""

    circuit: dict[str, Any]
    L: int = Field(ge=0)
    encoding: Encoding = Encoding.KITAEV_3LOCAL


class InstanceDocument(BaseModel):
    """
    One problem instance. Hamiltonian problems carry either `hamiltonian`
    (terms) or `clock`; channel problems carry `circuit` (PPIO) or `channel`.
    """

    problem: Problem
    hamiltonian: Optional[dict[str, Any]] = None
    clock: Optional[ClockDocument] = None
    circuit: Optional[dict[str, Any]] = None
    channel: Optional[dict[str, Any]] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    s: Optional[float] = None
    t: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    tau: Optional[float] = None
    cut: list[str] = ["A"]


def _hamiltonian_document(hamiltonian) -> dict:
    if isinstance(hamiltonian, ClockHamiltonian):
        config = hamiltonian.config
        return {
            "clock": {
                "circuit": channel_to_document(hamiltonian.channel),
                "L": config.L,
                "encoding": config.encoding.value,
            }
        }
    return {"hamiltonian": hamiltonian_to_document(hamiltonian)}


@singledispatch
def instance_to_document(inst) -> dict:
    """JSON-ready dictionary of a problem instance."""
    raise TypeError(f"No document format for {type(inst).__name__}")


@instance_to_document.register
def _(inst: HELESInstance) -> dict:
    return {
        "problem": "heles",
        **_hamiltonian_document(inst.hamiltonian),
        "alpha": inst.alpha,
        "beta": inst.beta,
        "s": inst.s,
        "t": inst.t,
        "cut": list(inst.cut),
    }


@instance_to_document.register
def _(inst: LELESInstance) -> dict:
    return {
        "problem": "leles",
        **_hamiltonian_document(inst.hamiltonian),
        "alpha": inst.alpha,
        "beta": inst.beta,
        "s": inst.s,
        "t": inst.t,
        "cut": list(inst.cut),
    }


@instance_to_document.register
def _(inst: LEAPSInstance) -> dict:
    return {
        "problem": "leaps",
        **_hamiltonian_document(inst.hamiltonian),
        "alpha": inst.alpha,
        "beta": inst.beta,
        "a": inst.a,
        "b": inst.b,
        "cut": list(inst.cut),
    }


@instance_to_document.register
def _(inst: SeparableInstance) -> dict:
    return {
        "problem": "separable",
        **_hamiltonian_document(inst.hamiltonian),
        "alpha": inst.alpha,
        "beta": inst.beta,
        "cut": list(inst.cut),
    }


@instance_to_document.register
def _(inst: FEAInstance) -> dict:
    return {"problem": "fea", **_hamiltonian_document(inst.hamiltonian), "beta": inst.beta, "a": inst.a, "b": inst.b}


@instance_to_document.register
def _(inst: PPIOInstance) -> dict:
    return {"problem": "ppio", "circuit": channel_to_document(inst.circuit), "a": inst.a, "b": inst.b}


@instance_to_document.register
def _(inst: MaxOutQEAInstance) -> dict:
    return {"problem": "maxoutqea", "channel": channel_to_document(inst.channel), "tau": inst.tau}


@instance_to_document.register
def _(inst: CIMMInstance) -> dict:
    return {"problem": "cimm", "channel": channel_to_document(inst.channel), "a": inst.a, "b": inst.b}


def _require(doc: InstanceDocument, *names: str) -> list:
    missing = [n for n in names if getattr(doc, n) is None]
    if missing:
        raise MalformedInputError(f"A {doc.problem} instance needs {', '.join(missing)}")
    return [getattr(doc, n) for n in names]


def _decode_hamiltonian(doc: InstanceDocument):
    if (doc.hamiltonian is None) == (doc.clock is None):
        raise MalformedInputError(f"A {doc.problem} instance needs exactly one of hamiltonian or clock")
    if doc.hamiltonian is not None:
        hamiltonian, _ = hamiltonian_from_document(doc.hamiltonian)
        return hamiltonian
    channel = channel_from_document(doc.clock.circuit)
    return build(channel, ClockConfig(channel.T, doc.clock.L, doc.clock.encoding))


def _decode(doc: InstanceDocument):
    if doc.problem in ("heles", "leles"):
        alpha, beta, s, t = _require(doc, "alpha", "beta", "s", "t")
        kind = HELESInstance if doc.problem == "heles" else LELESInstance
        return kind(_decode_hamiltonian(doc), alpha, beta, s, t, cut=tuple(doc.cut))
    if doc.problem == "leaps":
        alpha, beta, a, b = _require(doc, "alpha", "beta", "a", "b")
        return LEAPSInstance(_decode_hamiltonian(doc), alpha, beta, a, b, cut=tuple(doc.cut))
    if doc.problem == "separable":
        alpha, beta = _require(doc, "alpha", "beta")
        return SeparableInstance(_decode_hamiltonian(doc), alpha, beta, cut=tuple(doc.cut))
    if doc.problem == "fea":
        beta, a, b = _require(doc, "beta", "a", "b")
        return FEAInstance(_decode_hamiltonian(doc), beta, a, b)
    if doc.problem == "ppio":
        circuit, a, b = _require(doc, "circuit", "a", "b")
        return PPIOInstance(channel_from_document(circuit), a, b)
    if doc.problem == "maxoutqea":
        channel, tau = _require(doc, "channel", "tau")
        return MaxOutQEAInstance(channel_from_document(channel), tau)
    channel, a, b = _require(doc, "channel", "a", "b")
    return CIMMInstance(channel_from_document(channel), a, b)


def instance_from_document(data: Any):
    """
    Decode an instance dictionary.

    Invariant violations are reported as MalformedInputError; budget
    overruns while building a clock Hamiltonian keep their own type.
    """
    doc = parse_document(InstanceDocument, data)
    try:
        return _decode(doc)
    except (MalformedInputError, BudgetExceededError):
        raise
    except (LabError, ValueError) as exc:
        raise MalformedInputError(f"Invalid {doc.problem} instance: {exc}") from exc


def load_instance(path: str | Path):
    """Read an instance JSON file."""
    return instance_from_document(read_json(path))


def verdict_to_document(verdict: Verdict) -> dict:
    """{"decision", "value", "energy", "witness", "optimizer_report", "details"}"""
    report = None
    if verdict.report is not None:
        report = verdict.report._asdict()
    return {
        "decision": verdict.decision.value,
        "value": verdict.value,
        "energy": verdict.energy,
        "witness": None if verdict.witness is None else state_to_document(verdict.witness),
        "optimizer_report": report,
        "details": verdict.details,
    }
