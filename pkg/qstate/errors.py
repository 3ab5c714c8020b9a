class LabError(Exception):
    """Base class for every error raised by the laboratory packages."""


class LayoutError(LabError, ValueError):
    """Unknown register, name collision, layout mismatch or trivial cut."""


class InvalidStateError(LabError, ValueError):
    """A state, operator or unitary failed validation."""


class InvalidInstanceError(LabError, ValueError):
    """A problem instance violates its own invariants."""


class MalformedInputError(LabError, ValueError):
    """A JSON document does not match its schema."""


class BudgetExceededError(LabError):
    """The requested object does not fit the desk-scale budget."""


class InfeasibleParameterError(BudgetExceededError):
    """No parameter value within the budget satisfies the requirements.

    Attributes:
        required: the smallest value that would satisfy the requirements, if known.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class PromiseViolationError(LabError):
    """The prover's state does not satisfy the protocol promise."""


class ZeroProbabilityError(LabError):
    """A measurement outcome or projection has (numerically) zero probability."""


class ConvergenceError(LabError):
    """An iterative eigensolver did not converge.

    Attributes:
        residual: the largest residual norm reported by the solver.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
