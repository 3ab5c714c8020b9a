from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
import structlog
from scipy.optimize import minimize

from hamiltonian import energy, spectrum
from qstate import ATOL, MAX_DENSE_QUBITS, PureState, RegisterLayout, cut_matrix, shannon_entropy
from qstate.errors import BudgetExceededError, InvalidInstanceError, LayoutError

from ._instances import Hamiltonian, OptimizerReport

log = structlog.get_logger(__name__)

DEFAULT_RESTARTS = 32

# Largest low-energy span the optimizer searches
MAX_SPAN_DIM = 64

# Hilbert spaces up to this dimension also get a constrained full-space search
FULL_SPACE_DIM = 64

# Agreement asked of an optimised objective
OBJECTIVE_TOL = 1e-6

# Reduced-state Gram tensors larger than this are not precomputed
MAX_GRAM_ENTRIES = 2**22

# Loss reported for a (numerically) zero coefficient vector
_DEGENERATE_LOSS = 1e3


class Objective(str, Enum):
    """Quantity optimised over a set of pure states, read from the squared Schmidt coefficients."""

    MAX_ENTROPY = "max-entropy"
    MIN_ENTROPY = "min-entropy"
    MIN_PRODUCT_DISTANCE = "min-product-distance"
    MIN_MIXED_DISTANCE = "min-mixed-distance"

    def value(self, weights: np.ndarray) -> float:
        """
        The objective for squared Schmidt coefficients `weights` on the cut side.

        Entropies are in bits, the product distance is min ‖ψ − φ_L⊗φ_R‖₁ =
        2√(1 − λ₁²) and the mixed distance is ‖ρ_cut − Ĩ‖₁.
        """
        if self in (Objective.MAX_ENTROPY, Objective.MIN_ENTROPY):
            return shannon_entropy(weights)
        if self is Objective.MIN_PRODUCT_DISTANCE:
            return float(2.0 * np.sqrt(max(0.0, 1.0 - weights.max())))
        return float(np.abs(weights - 1.0 / weights.size).sum())

    def loss(self, weights: np.ndarray) -> float:
        """A smooth quantity minimised in place of `value`."""
        if self is Objective.MAX_ENTROPY:
            return -shannon_entropy(weights)
        if self is Objective.MIN_PRODUCT_DISTANCE:
            return float(1.0 - weights.max())
        return self.value(weights)

    @property
    def maximize(self) -> bool:
        return self is Objective.MAX_ENTROPY


class SchmidtWeights:
    """
    Squared Schmidt coefficients of Σ cᵢ|eᵢ⟩ across a fixed cut.

    The reduced state on the smaller side is a quadratic form in c; its Gram
    tensor is precomputed when it fits MAX_GRAM_ENTRIES, otherwise every call
    runs an SVD of the cut matrix.
    """

    def __init__(self, basis: np.ndarray, layout: RegisterLayout, cut: Iterable[str] | str):
        """
        Parameters:
        - basis: columns |eᵢ⟩ on `layout`.
        - layout (RegisterLayout): layout of the basis vectors.
        - cut: registers on the measured side.
        """
        columns = np.asarray(basis, dtype=complex)
        if columns.ndim != 2 or columns.shape[0] != layout.dim:
            raise LayoutError(f"Basis of shape {columns.shape} for {layout}")
        self._mats = np.stack(
            [cut_matrix(PureState(layout, columns[:, i], validate=False), cut)[0] for i in range(columns.shape[1])]
        )
        count, left, right = self._mats.shape
        self._left = left
        self._gram = None
        if count * count * min(left, right) ** 2 <= MAX_GRAM_ENTRIES:
            if left <= right:
                self._gram = np.einsum("iab,jcb->ijac", self._mats, self._mats.conj())
            else:
                self._gram = np.einsum("iab,jac->ijbc", self._mats, self._mats.conj())

    @property
    def cut_dim(self) -> int:
        return self._left

    def __call__(self, coefficients: np.ndarray) -> np.ndarray:
        """Weights on the cut side, descending, zero-padded to its dimension."""
        c = np.asarray(coefficients, dtype=complex)
        if self._gram is not None:
            reduced = np.einsum("i,j,ijac->ac", c, c.conj(), self._gram)
            w = np.linalg.eigvalsh((reduced + reduced.conj().T) / 2)
        else:
            w = np.linalg.svd(np.tensordot(c, self._mats, axes=1), compute_uv=False) ** 2
        w = np.sort(np.clip(w, 0.0, None))[::-1][: self._left]
        out = np.zeros(self._left)
        out[: w.size] = w
        return out


def objective_value(state: PureState, cut: Iterable[str] | str, objective: Objective | str) -> float:
    """The objective of a single pure state."""
    weights = SchmidtWeights(state.amplitudes[:, None], state.layout, cut)
    return Objective(objective).value(weights(np.ones(1)))


def product_distance(state: PureState, cut: Iterable[str] | str) -> float:
    """min over product states φ_L⊗φ_R of ‖ψ − φ_L⊗φ_R‖₁, which is 2√(1 − λ₁²)."""
    return objective_value(state, cut, Objective.MIN_PRODUCT_DISTANCE)


def coefficients(theta: np.ndarray) -> np.ndarray | None:
    """Normalised complex vector from real parameters (real parts, then imaginary parts)."""
    half = theta.size // 2
    c = theta[:half] + 1j * theta[half:]
    norm = np.linalg.norm(c)
    if norm <= ATOL:
        return None
    return c / norm


def parameters(vector: np.ndarray) -> np.ndarray:
    """Inverse of `coefficients` for a normalised vector."""
    return np.concatenate([vector.real, vector.imag])


class SearchResult(NamedTuple):
    x: np.ndarray
    loss: float
    report: OptimizerReport


def _local_search(loss: Callable[[np.ndarray], float], x0: np.ndarray) -> tuple[np.ndarray, float, int, int]:
    coarse = minimize(
        loss,
        x0,
        method="Nelder-Mead",
        options={"maxiter": 200 * x0.size, "xatol": 1e-8, "fatol": 1e-10, "adaptive": x0.size > 8},
    )
    polish = minimize(loss, coarse.x, method="L-BFGS-B")
    best = polish if polish.fun <= coarse.fun else coarse
    return best.x, float(best.fun), int(coarse.nit + polish.nit), int(coarse.nfev + polish.nfev)


def multistart_minimize(
    loss: Callable[[np.ndarray], float],
    dimension: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | None = None,
    threads: int = 1,
    starts: Sequence[np.ndarray] = (),
) -> SearchResult:
    """
    Minimise `loss` from several starting points.

    Each restart runs Nelder-Mead followed by an L-BFGS-B polish. Restarts
    beyond the given `starts` draw a standard normal point from their own
    seed spawned off `seed`, so the result does not depend on `threads`.

    Parameters:
    - loss: function of a real vector of length `dimension`.
    - dimension (int): number of real parameters.
    - restarts (int): number of local searches, at least 1.
    - seed (int, optional): root of the seed tree.
    - threads (int): worker threads.
    - starts: explicit starting points used by the first restarts.

    Returns:
    - SearchResult: best point, its loss and the run statistics.
    """
    restarts = max(1, restarts)
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    guesses = [np.asarray(x, dtype=float) for x in starts]

    def run(i: int):
        if i < len(guesses):
            x0 = guesses[i]
        else:
            x0 = np.random.default_rng(seeds[i]).standard_normal(dimension)
        return _local_search(loss, x0)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        runs = list(pool.map(run, range(restarts)))

    best = min(range(restarts), key=lambda i: runs[i][1])
    report = OptimizerReport(
        restarts,
        sum(r[2] for r in runs),
        sum(r[3] for r in runs),
        runs[best][1],
    )
    return SearchResult(runs[best][0], runs[best][1], report)


def _span_loss(weights: SchmidtWeights, objective: Objective) -> Callable[[np.ndarray], float]:
    def loss(theta: np.ndarray) -> float:
        c = coefficients(theta)
        return _DEGENERATE_LOSS if c is None else objective.loss(weights(c))

    return loss


def optimize_span(
    basis: np.ndarray,
    layout: RegisterLayout,
    cut: Iterable[str] | str,
    objective: Objective | str,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | None = None,
    threads: int = 1,
) -> tuple[np.ndarray, OptimizerReport]:
    """
    Optimise the objective over normalised vectors Σ cᵢ|eᵢ⟩ of an orthonormal basis.

    The basis column with the best objective is the first starting point.

    Returns:
    - tuple: (coefficients c, OptimizerReport)
    """
    objective = Objective(objective)
    count = basis.shape[1]
    weights = SchmidtWeights(basis, layout, cut)
    loss = _span_loss(weights, objective)

    if count == 1:
        c = np.ones(1, dtype=complex)
        return c, OptimizerReport(0, 0, 1, loss(parameters(c)))

    units = np.eye(count, dtype=complex)
    first = min(range(count), key=lambda i: objective.loss(weights(units[i])))
    search = multistart_minimize(loss, 2 * count, restarts, seed, threads, [parameters(units[first])])
    return coefficients(search.x), search.report


def _full_space_search(
    hamiltonian: Hamiltonian,
    cutoff: float,
    objective: Objective,
    cut: Iterable[str] | str,
    start: np.ndarray,
) -> tuple[np.ndarray, OptimizerReport]:
    layout = hamiltonian.layout
    matrix = hamiltonian.sparse().toarray()
    loss = _span_loss(SchmidtWeights(np.eye(layout.dim, dtype=complex), layout, cut), objective)

    def slack(theta: np.ndarray) -> float:
        c = coefficients(theta)
        if c is None:
            return -1.0
        return cutoff - float(np.vdot(c, matrix @ c).real)

    x0 = parameters(start)
    result = minimize(
        loss,
        x0,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": slack}],
        options={"maxiter": 500, "ftol": 1e-12},
    )
    before = loss(x0)
    candidate = coefficients(result.x)
    improved = candidate is not None and slack(result.x) >= -ATOL and result.fun < before
    report = OptimizerReport(1, int(result.nit), int(result.nfev), float(min(before, result.fun)))
    return (candidate if improved else start), report


class LowEnergyOptimum(NamedTuple):
    state: PureState
    value: float
    energy: float
    report: OptimizerReport


def optimize_low_energy(
    hamiltonian: Hamiltonian,
    cutoff: float,
    objective: Objective | str,
    cut: Iterable[str] | str = ("A",),
    restarts: int = DEFAULT_RESTARTS,
    seed: int | None = None,
    threads: int = 1,
) -> LowEnergyOptimum:
    """
    Optimise an entanglement objective over states with energy ≤ cutoff.

    The search runs over the span of the eigenvectors with energy ≤ cutoff.
    When the whole space has dimension ≤ FULL_SPACE_DIM the best span state
    seeds an SLSQP search over the whole space under ⟨H⟩ ≤ cutoff.

    Parameters:
    - hamiltonian: a LocalHamiltonian or ClockHamiltonian.
    - cutoff (float): energy threshold.
    - objective (Objective): what to optimise.
    - cut: registers on the measured side.
    - restarts (int): random restarts.
    - seed (int, optional): root seed.
    - threads (int): worker threads.

    Returns:
    - LowEnergyOptimum: the state, its objective value and energy, and the
      optimizer statistics.
    """
    objective = Objective(objective)
    summary = spectrum(hamiltonian, cutoff)
    count = summary.low_energy_dimension
    if count == 0:
        raise InvalidInstanceError(
            f"No eigenvalue ≤ {cutoff}; the ground energy is {summary.ground_energy:.6g}"
        )
    if count > MAX_SPAN_DIM:
        raise BudgetExceededError(f"Low-energy span of dimension {count} exceeds {MAX_SPAN_DIM}")

    layout = hamiltonian.layout
    basis = summary.low_energy_basis
    c, report = optimize_span(basis, layout, cut, objective, restarts, seed, threads)
    vector = basis @ c
    if layout.dim <= FULL_SPACE_DIM:
        vector, extra = _full_space_search(hamiltonian, cutoff, objective, cut, vector)
        report = OptimizerReport.merge(report, extra)

    state = PureState(layout, vector / np.linalg.norm(vector), validate=False)
    value = objective_value(state, cut, objective)
    found = energy(hamiltonian, state)
    log.info(
        "low-energy optimum",
        objective=objective.value,
        span=count,
        value=value,
        energy=found,
        restarts=report.restarts,
        evaluations=report.evaluations,
    )
    return LowEnergyOptimum(state, value, found, report)


def optimize_isometry_output(
    isometry: np.ndarray,
    layout: RegisterLayout,
    cut: Iterable[str] | str,
    objective: Objective | str,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | None = None,
    threads: int = 1,
) -> tuple[np.ndarray, PureState, float, OptimizerReport]:
    """
    Optimise the objective of V|ψ⟩ over input states ψ.

    Parameters:
    - isometry: V as a (layout.dim, d_in) matrix with orthonormal columns.
    - layout (RegisterLayout): layout of the outputs.

    Returns:
    - tuple: (input amplitudes, output state, objective value, OptimizerReport)
    """
    objective = Objective(objective)
    c, report = optimize_span(isometry, layout, cut, objective, restarts, seed, threads)
    output = PureState(layout, isometry @ c, validate=False)
    return c, output, objective_value(output, cut, objective), report


def product_vector(left: np.ndarray, right: np.ndarray, layout: RegisterLayout, cut: Iterable[str] | str) -> np.ndarray:
    """Amplitudes of φ_L ⊗ φ_R in the register order of `layout`, φ_L living on `cut`."""
    names = layout.resolve(cut)
    rest = layout.complement(names)
    order = names + rest
    dims = [layout.register(n).dim for n in order]
    perm = [order.index(n) for n in layout.names]
    return np.kron(left, right).reshape(dims).transpose(perm).ravel()


def minimize_product_energy(
    hamiltonian: Hamiltonian,
    cut: Iterable[str] | str = ("A",),
    restarts: int = DEFAULT_RESTARTS,
    seed: int | None = None,
    threads: int = 1,
) -> tuple[PureState, float, OptimizerReport]:
    """
    min over product states φ_L⊗φ_R of ⟨H⟩ across the cut.

    Returns:
    - tuple: (best product state, its energy, OptimizerReport)
    """
    layout = hamiltonian.layout
    if layout.total_qubits > MAX_DENSE_QUBITS:
        raise BudgetExceededError(f"Product search on {layout.total_qubits} qubits exceeds {MAX_DENSE_QUBITS}")
    names = layout.resolve(cut)
    if not names or not layout.complement(names):
        raise LayoutError(f"Trivial cut {cut} on {layout}")
    d_left = layout.subset(names).dim
    d_right = layout.dim // d_left
    matrix = hamiltonian.sparse().toarray()

    def vector(theta: np.ndarray) -> np.ndarray | None:
        left = coefficients(theta[: 2 * d_left])
        right = coefficients(theta[2 * d_left :])
        if left is None or right is None:
            return None
        return product_vector(left, right, layout, names)

    def loss(theta: np.ndarray) -> float:
        v = vector(theta)
        return _DEGENERATE_LOSS if v is None else float(np.vdot(v, matrix @ v).real)

    search = multistart_minimize(loss, 2 * (d_left + d_right), restarts, seed, threads)
    state = PureState(layout, vector(search.x), validate=False)
    found = energy(hamiltonian, state)
    log.info("product energy minimised", energy=found, restarts=search.report.restarts)
    return state, found, search.report
