"""Dense tensor algebra on multipartite operators.

Conventions
-----------
``vec`` stacks columns.  A square matrix of side ``M*N`` is viewed as an
``M x M`` grid of ``N x N`` blocks; its realignment has one row per block,
ordered column-major over the block index, holding ``vec`` of that block.
With these two choices ``realign(kron(A, B), M, N) == outer(vec(A), vec(B))``.

Subsystems are addressed with 0-based indices throughout the library.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9


class DimensionError(ValueError):
    """Shapes or subsystem indices are inconsistent."""


class StateValidationError(ValueError):
    """A matrix violates a state invariant (Hermiticity, trace, positivity)."""


class StateMode(str, enum.Enum):
    DENSITY = "density"
    HERMITIAN = "hermitian"


def check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DimensionError("dims must be non-empty")
    if any(d < 2 for d in dims):
        raise DimensionError(f"every subsystem dimension must be >= 2, got {list(dims)}")
    return dims


def _check_square(T: np.ndarray, side: int | None = None) -> None:
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {T.shape}")
    if side is not None and T.shape[0] != side:
        raise DimensionError(f"expected side {side}, got {T.shape[0]}")


def _check_index(k: int, n: int) -> None:
    if not 0 <= k < n:
        raise DimensionError(f"subsystem index {k} out of range for {n} subsystems")


@dataclass(frozen=True)
class MultipartiteState:
    """A Hermitian operator on ``H_1 x ... x H_n`` with validated invariants.

    ``mode=DENSITY`` additionally requires unit trace and positivity.
    ``mode=HERMITIAN`` is used for partially transposed states, which are only
    Hermitian.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    mode: StateMode = StateMode.DENSITY
    tol_herm: float = field(default=TOL_HERM, repr=False, compare=False)
    tol_trace: float = field(default=TOL_TRACE, repr=False, compare=False)
    tol_psd: float = field(default=TOL_PSD, repr=False, compare=False)

    def __post_init__(self):
        dims = check_dims(self.dims)
        mat = np.array(self.matrix, dtype=complex)
        _check_square(mat)
        total = int(np.prod(dims))
        if mat.shape[0] != total:
            raise DimensionError(
                f"matrix side {mat.shape[0]} does not match prod(dims) = {total} for dims {list(dims)}"
            )
        if not np.all(np.isfinite(mat)):
            raise StateValidationError("matrix has non-finite entries")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mode", StateMode(self.mode))

        herm_err = np.linalg.norm(mat - mat.conj().T)
        if herm_err > self.tol_herm:
            raise StateValidationError(f"not Hermitian: |A - A^dag|_F = {herm_err:.3e} > {self.tol_herm:g}")
        if self.mode is StateMode.DENSITY:
            tr = np.trace(mat)
            if abs(tr - 1) > self.tol_trace:
                raise StateValidationError(f"trace is {tr.real:.17g}, |trace - 1| > {self.tol_trace:g}")
            lam_min = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
            if lam_min < -self.tol_psd:
                raise StateValidationError(f"not positive semidefinite: min eigenvalue {lam_min:.3e}")

    @property
    def total(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return len(self.dims)


def vec(A: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: ``[a_11, a_21, ..., a_M1, a_12, ...]``."""
    A = np.asarray(A)
    return A.reshape(-1, order="F").copy()


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size != rows * cols:
        raise DimensionError(f"cannot reshape vector of length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols, order="F").copy()


def realign(Z: np.ndarray, M: int, N: int) -> np.ndarray:
    """Realignment of an ``MN x MN`` matrix viewed as ``M x M`` blocks of size ``N x N``.

    Row ``i + M*j`` is ``vec(Z_ij)^T``, so the result has shape ``(M**2, N**2)``.
    """
    Z = np.asarray(Z)
    if Z.shape != (M * N, M * N):
        raise DimensionError(f"realign expects shape {(M * N, M * N)}, got {Z.shape}")
    # Z[i*N + k, j*N + l] -> R[j*M + i, l*N + k]
    return Z.reshape(M, N, M, N).transpose(2, 0, 3, 1).reshape(M * M, N * N)


def unrealign(R: np.ndarray, M: int, N: int) -> np.ndarray:
    """Inverse of :func:`realign`."""
    R = np.asarray(R)
    if R.shape != (M * M, N * N):
        raise DimensionError(f"unrealign expects shape {(M * M, N * N)}, got {R.shape}")
    return R.reshape(M, M, N, N).transpose(1, 3, 0, 2).reshape(M * N, M * N)


def _front_order(n: int, i: int) -> list[int]:
    return [i] + [k for k in range(n) if k != i]


def permute_subsystems(T: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: subsystem ``order[p]`` of ``T`` becomes position ``p``.

    Rows and columns are permuted by the same mixed-radix index map, so
    ``permute_subsystems(kron(A, B), [m, n], [1, 0]) == kron(B, A)``.
    """
    dims = tuple(dims)
    n = len(dims)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise DimensionError(f"{order} is not a permutation of {n} subsystems")
    total = int(np.prod(dims))
    T = np.asarray(T)
    _check_square(T, total)
    axes = order + [n + k for k in order]
    return T.reshape(dims + dims).transpose(axes).reshape(total, total)


def realign_bipartition(T: np.ndarray, dims: Sequence[int], i: int) -> np.ndarray:
    """Realignment across the cut ``i | rest``: subsystem ``i`` moved to the front first."""
    dims = check_dims(dims)
    _check_index(i, len(dims))
    total = int(np.prod(dims))
    P = permute_subsystems(T, dims, _front_order(len(dims), i))
    return realign(P, dims[i], total // dims[i])


def unrealign_bipartition(R: np.ndarray, dims: Sequence[int], i: int) -> np.ndarray:
    """Inverse of :func:`realign_bipartition`."""
    dims = check_dims(dims)
    _check_index(i, len(dims))
    total = int(np.prod(dims))
    P = unrealign(R, dims[i], total // dims[i])
    order = _front_order(len(dims), i)
    inverse = list(np.argsort(order))
    permuted_dims = [dims[k] for k in order]
    return permute_subsystems(P, permuted_dims, inverse)


def tensor_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of ``factors`` in order."""
    if len(factors) == 0:
        raise DimensionError("tensor_product needs at least one factor")
    return reduce(np.kron, [np.asarray(f) for f in factors])


def partial_transpose_matrix(T: np.ndarray, dims: Sequence[int], subsystems) -> np.ndarray:
    """Transpose the indices of the given subsystems only."""
    dims = check_dims(dims)
    n = len(dims)
    if isinstance(subsystems, (int, np.integer)):
        subsystems = [subsystems]
    total = int(np.prod(dims))
    T = np.asarray(T)
    _check_square(T, total)
    axes = list(range(2 * n))
    for k in subsystems:
        _check_index(k, n)
        axes[k], axes[n + k] = n + k, k
    return T.reshape(dims + dims).transpose(axes).reshape(total, total)


def partial_transpose(S: MultipartiteState, k) -> MultipartiteState:
    """Partial transpose of a state with respect to subsystem(s) ``k``.

    The result is only guaranteed Hermitian, so it carries ``mode=HERMITIAN``.
    """
    mat = partial_transpose_matrix(S.matrix, S.dims, k)
    return MultipartiteState(mat, S.dims, StateMode.HERMITIAN, tol_herm=S.tol_herm)


def partial_trace(T: np.ndarray, dims: Sequence[int], k) -> np.ndarray:
    """Trace out subsystem(s) ``k``; the remaining subsystems keep their order."""
    dims = check_dims(dims)
    n = len(dims)
    if isinstance(k, (int, np.integer)):
        k = [k]
    k = sorted(set(int(x) for x in k))
    for x in k:
        _check_index(x, n)
    total = int(np.prod(dims))
    T = np.asarray(T)
    _check_square(T, total)
    keep = [x for x in range(n) if x not in k]
    traced = int(np.prod([dims[x] for x in k]))
    kept = total // traced
    order = k + keep
    t = T.reshape(dims + dims).transpose(order + [n + x for x in order])
    t = t.reshape(traced, kept, traced, kept)
    return np.trace(t, axis1=0, axis2=2)


def reduced_state(T: np.ndarray, dims: Sequence[int], k: int) -> np.ndarray:
    """Reduced operator on subsystem ``k`` (all others traced out)."""
    dims = check_dims(dims)
    _check_index(k, len(dims))
    others = [x for x in range(len(dims)) if x != k]
    if not others:
        return np.asarray(T).copy()
    return partial_trace(T, dims, others)
