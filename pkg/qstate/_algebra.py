from typing import Iterable, Sequence
from math import prod

import numpy as np
from scipy import sparse

from ._layout import RegisterLayout
from ._state import DensityMatrix, PureState
from .errors import LayoutError


def tensor(a: PureState | DensityMatrix, b: PureState | DensityMatrix):
    """
    Kronecker product of two states of the same kind.

    Parameters:
    - a, b: states on layouts with disjoint register names.

    Returns:
    - PureState | DensityMatrix: the product on the concatenated layout.
    """
    layout = a.layout.concat(b.layout)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(layout, np.kron(a.amplitudes, b.amplitudes), validate=False)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(layout, np.kron(a.matrix, b.matrix), validate=False)
    raise TypeError("tensor expects two PureStates or two DensityMatrices")


def reduce_sites(data: np.ndarray, site_dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """
    Reduced density matrix on a list of sites.

    Parameters:
    - data: a state vector (1-D) or density matrix (2-D) over `site_dims`.
    - site_dims: dimension of every tensor factor.
    - keep: site indices to keep; the output follows this order.

    Returns:
    - np.ndarray: the reduced density matrix.
    """
    dims = list(site_dims)
    keep = list(keep)
    rest = [i for i in range(len(dims)) if i not in keep]
    dk = prod(dims[i] for i in keep)

    if data.ndim == 1:
        psi = data.reshape(dims).transpose(keep + rest).reshape(dk, -1)
        return psi @ psi.conj().T

    n = len(dims)
    dr = prod(dims[i] for i in rest)
    t = data.reshape(dims + dims)
    t = t.transpose(keep + rest + [n + i for i in keep] + [n + i for i in rest])
    return np.einsum("ajbj->ab", t.reshape(dk, dr, dk, dr))


def partial_trace(state: PureState | DensityMatrix, keep: Iterable[str] | str) -> DensityMatrix:
    """
    Trace out every register not listed in `keep`.

    Parameters:
    - state: a pure state or density matrix.
    - keep: register names to keep; layout order is preserved.

    Returns:
    - DensityMatrix: the reduced state.
    """
    layout = state.layout
    names = layout.resolve(keep)
    if not names:
        raise LayoutError("partial_trace needs at least one register to keep")

    kept = [layout.index(n) for n in names]
    data = state.amplitudes if isinstance(state, PureState) else state.matrix
    reduced = reduce_sites(data, layout.dims, kept)
    return DensityMatrix(layout.subset(names), reduced, validate=False)


def target_sites(layout: RegisterLayout, registers=None, qubits=None) -> list[int]:
    """Translate register names or physical qubit indices into site indices."""
    if (registers is None) == (qubits is None):
        raise ValueError("Give exactly one of registers or qubits")
    if registers is not None:
        if isinstance(registers, str):
            registers = [registers]
        sites = []
        for name in registers:
            sites.extend(layout.register_sites(name))
        return sites
    return [layout.qubit_site(q) for q in qubits]


def _apply_left(matrix: np.ndarray, op, site_dims: Sequence[int], targets: Sequence[int]):
    """Apply `op` on the row index of a (D, k) matrix, acting on the target sites."""
    dims = list(site_dims)
    targets = list(targets)
    rest = [i for i in range(len(dims)) if i not in targets]
    cols = matrix.shape[1]
    dt = prod(dims[i] for i in targets)

    perm = targets + rest
    t = matrix.reshape(dims + [cols]).transpose(perm + [len(dims)])
    t = (op @ t.reshape(dt, -1)).reshape([dims[i] for i in perm] + [cols])
    inverse = np.argsort(perm).tolist()
    return t.transpose(inverse + [len(dims)]).reshape(matrix.shape[0], cols)


def apply_operator(state, op, registers=None, qubits=None):
    """
    Apply a local operator to a state without forming the full matrix.

    For a PureState returns op|ψ⟩ (unnormalised if op is not unitary, so the
    result is a bare vector in that case); for a DensityMatrix returns
    op ρ op† as a bare matrix. Unitary callers wrap the result again.

    Parameters:
    - state: PureState or DensityMatrix.
    - op: square matrix acting on the listed registers or qubits, in order.
    - registers: register names the operator acts on.
    - qubits: physical qubit indices the operator acts on.

    Returns:
    - np.ndarray: the transformed vector or matrix.
    """
    layout = state.layout
    sites = target_sites(layout, registers, qubits)
    dims = layout.site_dims
    op = np.asarray(op, dtype=complex)
    if op.shape != (prod(dims[s] for s in sites),) * 2:
        raise LayoutError(f"Operator of shape {op.shape} does not fit the target sites")

    if isinstance(state, PureState):
        return _apply_left(state.amplitudes.reshape(-1, 1), op, dims, sites).ravel()
    left = _apply_left(state.matrix, op, dims, sites)
    return _apply_left(left.conj().T, op, dims, sites)


def evolve(state, unitary, registers=None, qubits=None):
    """Apply a unitary and keep the state type."""
    out = apply_operator(state, unitary, registers=registers, qubits=qubits)
    if isinstance(state, PureState):
        return PureState(state.layout, out, validate=False)
    return DensityMatrix(state.layout, out, validate=False)


def embed_operator(op, site_dims: Sequence[int], targets: Sequence[int]) -> sparse.csr_array:
    """
    Sparse embedding of a local operator into the full space.

    Parameters:
    - op: dense or sparse matrix on the target sites, first target most significant.
    - site_dims: dimension of every site.
    - targets: site indices the operator acts on.

    Returns:
    - scipy.sparse.csr_array: op ⊗ I with the factors in site order.
    """
    dims = list(site_dims)
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise LayoutError(f"Repeated target sites {targets}")
    if any(not 0 <= t < len(dims) for t in targets):
        raise LayoutError(f"Target sites {targets} outside {len(dims)} sites")
    rest = [i for i in range(len(dims)) if i not in targets]

    strides = [prod(dims[i + 1 :]) for i in range(len(dims))]

    def offsets(sites):
        out = np.zeros(1, dtype=np.int64)
        for s in sites:
            out = (out[:, None] + np.arange(dims[s], dtype=np.int64) * strides[s]).ravel()
        return out

    local = offsets(targets)
    others = offsets(rest)

    coo = sparse.coo_array(op)
    rows = (local[coo.row][:, None] + others[None, :]).ravel()
    cols = (local[coo.col][:, None] + others[None, :]).ravel()
    vals = np.repeat(coo.data.astype(complex), len(others))

    total = prod(dims)
    return sparse.csr_array((vals, (rows, cols)), shape=(total, total))
