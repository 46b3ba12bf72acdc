"""Rank-one realignment tests and extraction of tensor-product factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import DimensionError, check_dims, realign, realign_bipartition, tensor_product, unvec

TOL_RANK = 1e-7


class RankError(ValueError):
    """The realigned matrix is not rank one at the given cut."""

    def __init__(self, deficiency: float, cut: int | None = None, tol_rank: float | None = None):
        self.deficiency = float(deficiency)
        self.cut = cut
        # within a decade of the threshold: more likely a tolerance choice than a true non-product
        self.near_miss = tol_rank is not None and self.deficiency < 10 * tol_rank
        where = "" if cut is None else f" at cut {cut}"
        hint = " (near miss: consider loosening tol_rank)" if self.near_miss else ""
        super().__init__(f"realignment is not rank one{where}: deficiency {self.deficiency:.3e}{hint}")


@dataclass(frozen=True)
class RealignmentSVD:
    sigma: np.ndarray
    left: np.ndarray
    right: np.ndarray
    M: int
    N: int

    @property
    def deficiency(self) -> float:
        return rank_one_deficiency(self.sigma)


@dataclass(frozen=True)
class LocalUnitaryFactorization:
    factors: tuple[np.ndarray, ...]
    residual: float

    @property
    def matrix(self) -> np.ndarray:
        return tensor_product(self.factors)


def rank_one_deficiency(sigma) -> float:
    """``1 - s_1^2 / sum s_i^2``, evaluated as a tail sum so it is accurate near zero."""
    s2 = np.asarray(sigma, dtype=float) ** 2
    total = s2.sum()
    if total == 0:
        return 0.0
    return float(s2[1:].sum() / total)


def nearest_unitary(A: np.ndarray) -> np.ndarray:
    """Unitary polar factor of ``A``."""
    u, _, vh = np.linalg.svd(A)
    return u @ vh


def realignment_svd(W: np.ndarray, M: int, N: int) -> RealignmentSVD:
    R = realign(W, M, N)
    u, s, vh = np.linalg.svd(R)
    return RealignmentSVD(sigma=s, left=u, right=vh.conj().T, M=M, N=N)


def _canonical_phase(A: np.ndarray) -> complex:
    z = A.flat[np.argmax(np.abs(A))]
    return np.abs(z) / z


def nearest_kron_factors(W: np.ndarray, M: int, N: int, tol_rank: float = TOL_RANK):
    """Split an ``MN x MN`` unitary into ``u1 (M x M)`` and ``u2 (N x N)`` with ``W ~ u1 x u2``.

    Returns ``(u1, u2, residual)`` where ``residual = |W - u1 x u2|_F``.  The
    factors are projected onto the unitary group, and ``u1`` is phase-fixed so
    its largest entry is real positive (the compensating phase goes to ``u2``).

    Raises :class:`RankError` when the realignment deficiency exceeds ``tol_rank``.
    """
    W = np.asarray(W, dtype=complex)
    if W.shape != (M * N, M * N):
        raise DimensionError(f"expected shape {(M * N, M * N)}, got {W.shape}")
    svd = realignment_svd(W, M, N)
    deficiency = svd.deficiency
    if deficiency > tol_rank:
        raise RankError(deficiency, tol_rank=tol_rank)
    s1 = svd.sigma[0]
    alpha = M / s1
    u1 = unvec(np.sqrt(alpha * s1) * svd.left[:, 0], M, M)
    u2 = unvec(np.sqrt(s1 / alpha) * svd.right[:, 0].conj(), N, N)
    u1, u2 = nearest_unitary(u1), nearest_unitary(u2)
    ph = _canonical_phase(u1)
    u1, u2 = u1 * ph, u2 / ph
    # polar projection may shift the joint phase; refit it against W
    K = np.kron(u1, u2)
    c = np.vdot(K, W)
    u2 = u2 * (c / abs(c)) if c != 0 else u2
    residual = float(np.linalg.norm(W - np.kron(u1, u2)))
    return u1, u2, residual


def bipartition_deficiencies(W: np.ndarray, dims) -> np.ndarray:
    dims = check_dims(dims)
    out = []
    for i in range(len(dims)):
        s = np.linalg.svd(realign_bipartition(W, dims, i), compute_uv=False)
        out.append(rank_one_deficiency(s))
    return np.array(out)


def factor_local_unitary(W: np.ndarray, dims, tol_rank: float = TOL_RANK) -> LocalUnitaryFactorization:
    """Factor a unitary into ``u_1 x ... x u_n`` by peeling one subsystem at a time.

    Every cut ``i | rest`` is checked before peeling; the first failing cut is
    reported in :class:`RankError`.
    """
    dims = check_dims(dims)
    W = np.asarray(W, dtype=complex)
    total = int(np.prod(dims))
    if W.shape != (total, total):
        raise DimensionError(f"expected shape {(total, total)} for dims {list(dims)}, got {W.shape}")
    for i, d in enumerate(bipartition_deficiencies(W, dims)):
        if d > tol_rank:
            raise RankError(d, cut=i, tol_rank=tol_rank)

    factors = []
    rest = W
    for i in range(len(dims) - 1):
        m = dims[i]
        k = rest.shape[0] // m
        u, rest, _ = nearest_kron_factors(rest, m, k, tol_rank=np.inf)
        factors.append(u)
        rest = nearest_unitary(rest)
    factors.append(rest)
    # fold the best global phase into the last factor
    K = tensor_product(factors)
    c = np.vdot(K, W)
    if c != 0:
        factors[-1] = factors[-1] * (c / abs(c))
    residual = float(np.linalg.norm(W - tensor_product(factors)))
    return LocalUnitaryFactorization(tuple(factors), residual)
