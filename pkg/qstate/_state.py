import numpy as np

from ._constants import ATOL, PSD_CHECK_DIM
from ._layout import RegisterLayout
from .errors import InvalidStateError, LayoutError


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


class PureState:
    """A normalised state vector on a register layout."""

    def __init__(self, layout: RegisterLayout, amplitudes, validate: bool = True):
        """
        Parameters:
        - layout (RegisterLayout): the registers the vector lives on.
        - amplitudes: complex vector of length layout.dim.
        - validate (bool): check the length and the norm.
        """
        self._layout = layout
        self._amplitudes = _frozen(np.ravel(amplitudes))

        if validate:
            if self._amplitudes.shape != (layout.dim,):
                raise LayoutError(
                    f"Expected {layout.dim} amplitudes for {layout}, got {self._amplitudes.shape}"
                )
            norm = np.linalg.norm(self._amplitudes)
            if abs(norm - 1.0) > ATOL:
                raise InvalidStateError(f"State norm is {norm:.12f}, expected 1")

    @classmethod
    def normalized(cls, layout: RegisterLayout, vector) -> "PureState":
        """Build a state from an unnormalised non-zero vector."""
        vector = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise InvalidStateError("Cannot normalise the zero vector")
        return cls(layout, vector / norm)

    @property
    def layout(self) -> RegisterLayout:
        return self._layout

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def dim(self) -> int:
        return self._layout.dim

    def density(self) -> "DensityMatrix":
        psi = self._amplitudes
        return DensityMatrix(self._layout, np.outer(psi, psi.conj()), validate=False)

    def relabel(self, layout: RegisterLayout) -> "PureState":
        """Same amplitudes on an equally shaped layout with other names."""
        if layout.dims != self._layout.dims:
            raise LayoutError(f"Cannot relabel {self._layout} as {layout}")
        return PureState(layout, self._amplitudes, validate=False)

    def __repr__(self) -> str:
        return f"PureState({self._layout})"


class DensityMatrix:
    """A density operator on a register layout."""

    def __init__(self, layout: RegisterLayout, matrix, validate: bool = True):
        """
        Parameters:
        - layout (RegisterLayout): the registers the operator acts on.
        - matrix: complex square matrix of dimension layout.dim.
        - validate (bool): check Hermiticity, unit trace and (up to
          PSD_CHECK_DIM) positivity.
        """
        self._layout = layout
        self._matrix = _frozen(matrix)

        if validate:
            self._validate()

    def _validate(self):
        d = self._layout.dim
        m = self._matrix
        if m.shape != (d, d):
            raise LayoutError(f"Expected a {d}x{d} matrix for {self._layout}, got {m.shape}")
        if np.abs(m - m.conj().T).max() > ATOL:
            raise InvalidStateError("Density matrix is not Hermitian")
        trace = np.trace(m)
        if abs(trace - 1.0) > ATOL:
            raise InvalidStateError(f"Density matrix has trace {trace:.12f}, expected 1")
        if d <= PSD_CHECK_DIM:
            lowest = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
            if lowest < -ATOL:
                raise InvalidStateError(f"Density matrix has eigenvalue {lowest:.3e} < 0")

    @property
    def layout(self) -> RegisterLayout:
        return self._layout

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._layout.dim

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the Hermitised matrix, ascending and clipped at zero."""
        m = self._matrix
        return np.clip(np.linalg.eigvalsh((m + m.conj().T) / 2), 0.0, None)

    def relabel(self, layout: RegisterLayout) -> "DensityMatrix":
        if layout.dims != self._layout.dims:
            raise LayoutError(f"Cannot relabel {self._layout} as {layout}")
        return DensityMatrix(layout, self._matrix, validate=False)

    def __repr__(self) -> str:
        return f"DensityMatrix({self._layout})"


def as_density(state: PureState | DensityMatrix) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state
