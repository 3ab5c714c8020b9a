from typing import Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qstate.errors import InfeasibleParameterError

log = structlog.get_logger(__name__)

# Largest number of copies the parameter solver searches
MAX_COPIES = 2**40


def completeness(epsilon: float) -> float:
    """c = 1 − 4√(3ε), the honest acceptance probability."""
    return 1.0 - 4.0 * np.sqrt(3.0 * epsilon)


class ProtocolConfig(BaseModel):
    """
    Parameters of the entropy verification protocol.

    `c` defaults to 1 − 4√(3ε). `k` and `d` are the extractor requirements
    produced by `solve_parameters`; desk-scale runs may leave them unset.
    """

    model_config = ConfigDict(frozen=True)

    tau: float = Field(ge=0)
    q: int = Field(ge=1)
    epsilon: float = Field(gt=0, lt=1)
    delta: float = Field(gt=0)
    delta_prime: float = Field(gt=0)
    s: float
    c: Optional[float] = None
    n_a: int = Field(default=1, ge=1)
    k: Optional[float] = None
    d: Optional[int] = None

    @model_validator(mode="after")
    def _thresholds(self) -> "ProtocolConfig":
        if self.c is None:
            object.__setattr__(self, "c", completeness(self.epsilon))
        if not 0 < self.s < self.c <= 1:
            raise ValueError(f"Need 0 < s < c ≤ 1, got s={self.s}, c={self.c}")
        return self


def certified_entropy_bound(s: float, q: int, n_a: int, d: int) -> float:
    """
    Entropy guaranteed to an output accepted with probability ≥ s.

    q·n_A − 2√(1−s)(q·n_A − log₂(2√(1−s))) − d, from Fannes applied to
    ‖T(σ) − Ĩ‖₁ ≤ 2√(1−s) and the at most d bits a 2^d-regular extractor adds.
    """
    total = q * n_a
    gentle = 2.0 * np.sqrt(max(0.0, 1.0 - s))
    if gentle == 0.0:
        return float(total - d)
    return float(total - gentle * (total - np.log2(gentle)) - d)


def entropy_slack(q: int, n_a: int, s: float, epsilon: float) -> float:
    """Left-hand side of the δ′ requirement on q, the O(·) constant taken as 1."""
    gentle = 2.0 * np.sqrt(1.0 - s)
    fannes = gentle * (n_a - np.log2(gentle) / q)
    flattening = (n_a + np.log2(q / epsilon)) * np.sqrt(np.log2(1.0 / epsilon) / q)
    return float(fannes + flattening)


def solve_parameters(
    delta: float,
    delta_prime: float,
    n_a: int,
    tau: float,
    n: int | None = None,
) -> ProtocolConfig:
    """
    Choose s, ε, c and the smallest q in the order of the soundness argument.

    s from 2√(1−s)·n ≤ δ′/4, then ε from 4(3ε)^{1/4} ≤ δ and c − s ≥ (1−s)/2,
    then q by doubling and bisection until the δ′ requirement holds.

    Parameters:
    - delta (float): closeness of the honest output to ρ^{⊗q}.
    - delta_prime (float): entropy slack.
    - n_a (int): qubits whose entropy is verified.
    - tau (float): entropy target in bits.
    - n (int, optional): total qubits n_A + n_B; defaults to n_a.

    Returns:
    - ProtocolConfig: with the extractor requirements k and d filled in.
    """
    n = n_a if n is None else n
    s = 1.0 - (delta_prime / (8.0 * n)) ** 2
    epsilon = min((delta / 4.0) ** 4 / 3.0, ((1.0 - s) / 8.0) ** 2 / 3.0)

    def feasible(q: int) -> bool:
        return entropy_slack(q, n_a, s, epsilon) <= delta_prime

    high = 1
    while not feasible(high):
        high *= 2
        if high > MAX_COPIES:
            raise InfeasibleParameterError(f"No q ≤ {MAX_COPIES} meets δ′ = {delta_prime}")
    low = high // 2
    while high - low > 1:
        middle = (low + high) // 2
        if feasible(middle):
            high = middle
        else:
            low = middle
    q = high

    slack = (n_a + np.log2(q / epsilon)) * np.sqrt(q * np.log2(1.0 / epsilon))
    k = q * tau - slack
    d = int(np.ceil(max(0.0, q * n_a - k + 2.0 * np.log2(q * n_a / epsilon))))
    log.info("protocol parameters solved", q=q, s=s, epsilon=epsilon, d=d)
    return ProtocolConfig(
        tau=tau,
        q=q,
        epsilon=epsilon,
        delta=delta,
        delta_prime=delta_prime,
        s=s,
        n_a=n_a,
        k=float(k),
        d=d,
    )
