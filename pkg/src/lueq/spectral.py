"""Eigendecomposition, degeneracy structure and inequivalence screens."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor_core import DimensionError, MultipartiteState, StateValidationError, reduced_state

TOL_CLUSTER = 1e-8
TOL_SPECTRUM = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and the matching orthonormal eigenvectors (columns)."""

    values: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class GaugeBlockStructure:
    """Clustered eigenvalues ``(representative, multiplicity)`` in decreasing order."""

    blocks: tuple[tuple[float, int], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.blocks)

    @property
    def r(self) -> int:
        return len(self.blocks)

    @property
    def s(self) -> int:
        return sum(1 for _, m in self.blocks if m == 2)

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(np.cumsum((0,) + self.sizes[:-1]).tolist())

    @classmethod
    def from_sizes(cls, sizes, values=None) -> "GaugeBlockStructure":
        if values is None:
            values = [0.0] * len(sizes)
        return cls(tuple((float(v), int(m)) for v, m in zip(values, sizes)))


def _phase_fix(basis: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made real positive
    idx = np.argmax(np.abs(basis), axis=0)
    pivots = basis[idx, np.arange(basis.shape[1])]
    return basis * (np.abs(pivots) / pivots)


def eig_hermitian(S) -> Spectrum:
    """Hermitian eigendecomposition with descending eigenvalues and fixed eigenvector phases.

    Accepts a :class:`MultipartiteState` or a bare square matrix.
    """
    H = S.matrix if isinstance(S, MultipartiteState) else np.asarray(S, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {H.shape}")
    herm_err = np.linalg.norm(H - H.conj().T)
    if herm_err > 1e-10 * max(1.0, np.linalg.norm(H)):
        raise StateValidationError(f"eig_hermitian needs a Hermitian matrix, |H - H^dag|_F = {herm_err:.3e}")
    w, v = np.linalg.eigh(0.5 * (H + H.conj().T))
    w, v = w[::-1].copy(), v[:, ::-1]
    return Spectrum(values=w, basis=_phase_fix(v))


def group_spectrum(spec, tol_cluster: float = TOL_CLUSTER) -> GaugeBlockStructure:
    """Greedy clustering of descending eigenvalues: a value joins the current
    block when its gap to the previous value is at most ``tol_cluster``."""
    values = spec.values if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    blocks: list[list[float]] = []
    for lam in values:
        if blocks and blocks[-1][-1] - lam <= tol_cluster:
            blocks[-1].append(lam)
        else:
            blocks.append([lam])
    return GaugeBlockStructure(tuple((float(np.mean(b)), len(b)) for b in blocks))


def spectra_compatible(s1, s2, tol: float = TOL_SPECTRUM) -> bool:
    v1 = s1.values if isinstance(s1, Spectrum) else np.sort(np.asarray(s1, dtype=float))[::-1]
    v2 = s2.values if isinstance(s2, Spectrum) else np.sort(np.asarray(s2, dtype=float))[::-1]
    if v1.shape != v2.shape:
        raise DimensionError(f"spectra have different sizes {v1.size} and {v2.size}")
    return bool(np.max(np.abs(v1 - v2)) <= tol)


def schmidt_traces(vector: np.ndarray, dims, pmax: int) -> np.ndarray:
    """``Tr[(A A^dag)^p]`` for ``p = 1..pmax``, with ``A`` the ``N1 x N2`` coefficient matrix."""
    n1, n2 = dims
    A = np.asarray(vector).reshape(n1, n2)
    sv2 = np.linalg.svd(A, compute_uv=False) ** 2
    return np.array([np.sum(sv2**p) for p in range(1, pmax + 1)])


@dataclass
class ScreenResult:
    name: str
    status: str  # "pass" | "fail" | "n/a"
    detail: dict = field(default_factory=dict)


@dataclass
class ScreenReport:
    results: list[ScreenResult]

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    @property
    def failures(self) -> list[ScreenResult]:
        return [r for r in self.results if r.status == "fail"]

    def __getitem__(self, name: str) -> ScreenResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _subsystem_screen(S1, S2, tol):
    worst = 0.0
    where = None
    for k in range(S1.n):
        e1 = np.linalg.eigvalsh(reduced_state(S1.matrix, S1.dims, k))
        e2 = np.linalg.eigvalsh(reduced_state(S2.matrix, S2.dims, k))
        gap = float(np.max(np.abs(e1 - e2)))
        if gap > worst:
            worst, where = gap, k
    status = "fail" if worst > tol else "pass"
    return ScreenResult("subsystem_spectra", status, {"max_diff": worst, "subsystem": where})


def _trace_screen(S1, S2, pmax, tol_cluster, tol, min_gap):
    if S1.n != 2:
        return ScreenResult("schmidt_traces", "n/a", {"why": "only defined for bipartite states"})
    sp1, sp2 = eig_hermitian(S1), eig_hermitian(S2)
    vals = 0.5 * (sp1.values + sp2.values)
    checked, worst, where = 0, 0.0, None
    for a in range(vals.size):
        # eigenvectors are phase-unique only for isolated eigenvalues
        left = vals[a - 1] - vals[a] if a > 0 else np.inf
        right = vals[a] - vals[a + 1] if a + 1 < vals.size else np.inf
        if min(left, right) < max(min_gap, tol_cluster):
            continue
        t1 = schmidt_traces(sp1.basis[:, a], S1.dims, pmax)
        t2 = schmidt_traces(sp2.basis[:, a], S2.dims, pmax)
        diff = float(np.max(np.abs(t1 - t2)))
        checked += 1
        if diff > worst:
            worst, where = diff, a
    if checked == 0:
        return ScreenResult("schmidt_traces", "n/a", {"why": "no isolated eigenvalues"})
    status = "fail" if worst > tol else "pass"
    return ScreenResult("schmidt_traces", status, {"max_diff": worst, "eigen_index": where, "checked": checked})


def invariant_screens(
    S1: MultipartiteState,
    S2: MultipartiteState,
    pmax: int = 4,
    tol_cluster: float = TOL_CLUSTER,
    tol: float = 1e-7,
    min_gap: float = 1e-4,
) -> ScreenReport:
    """Necessary conditions for local unitary equivalence.

    * ``subsystem_spectra``: every reduced operator must have the same spectrum.
    * ``schmidt_traces`` (bipartite only): for each isolated eigenvalue, the
      eigenvectors' ``Tr[(A A^dag)^p]`` must agree.  Eigenvalues closer than
      ``min_gap`` to a neighbour are skipped, since their eigenvectors are not
      determined by the state.

    Any ``fail`` certifies inequivalence.
    """
    if S1.dims != S2.dims:
        raise DimensionError(f"dims differ: {list(S1.dims)} vs {list(S2.dims)}")
    return ScreenReport(
        [
            _subsystem_screen(S1, S2, tol),
            _trace_screen(S1, S2, pmax, tol_cluster, tol, min_gap),
        ]
    )
