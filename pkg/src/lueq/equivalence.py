"""Decision pipeline for local unitary equivalence with witness extraction."""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gauge_search import SearchConfig, search_gauge
from .realign_factor import LocalUnitaryFactorization, RankError, factor_local_unitary
from .spectral import (
    TOL_CLUSTER,
    TOL_SPECTRUM,
    eig_hermitian,
    group_spectrum,
    invariant_screens,
    spectra_compatible,
)
from .tensor_core import DimensionError, MultipartiteState, partial_transpose, tensor_product

TOL_VERIFY = 1e-8


class Verdict(str, enum.Enum):
    EQUIVALENT = "equivalent"
    INEQUIVALENT = "inequivalent"
    UNDETERMINED = "undetermined"


@dataclass
class CheckConfig:
    tol_cluster: float = TOL_CLUSTER
    tol_spectrum: float = TOL_SPECTRUM
    tol_verify: float = TOL_VERIFY
    tol_screen: float = 1e-7
    pmax: int = 4
    # "auto" picks the least degenerate subset; None or () disables; a
    # sequence of 0-based subsystems forces that subset
    pt: str | Sequence[int] | None = "auto"
    search: SearchConfig = field(default_factory=SearchConfig)


@dataclass
class EquivalenceVerdict:
    kind: Verdict
    witness: LocalUnitaryFactorization | None = None
    residual: float | None = None
    reason: dict = field(default_factory=dict)
    pt_subset: tuple[int, ...] = ()

    @property
    def equivalent(self) -> bool:
        return self.kind is Verdict.EQUIVALENT


def verify_witness(S1: MultipartiteState, S2: MultipartiteState, factors) -> float:
    """``|(x u_i) rho_1 (x u_i)^dag - rho_2|_F``."""
    if isinstance(factors, LocalUnitaryFactorization):
        factors = factors.factors
    if len(factors) != S1.n or any(np.shape(u) != (d, d) for u, d in zip(factors, S1.dims)):
        raise DimensionError(f"witness shapes {[np.shape(u) for u in factors]} do not match dims {list(S1.dims)}")
    if S1.dims != S2.dims:
        raise DimensionError(f"dims differ: {list(S1.dims)} vs {list(S2.dims)}")
    W = tensor_product(factors)
    return float(np.linalg.norm(W @ S1.matrix @ W.conj().T - S2.matrix))


def candidate_subsets(n: int) -> list[tuple[int, ...]]:
    subsets = [()] + [(k,) for k in range(n)]
    if n <= 4:
        subsets += list(itertools.combinations(range(n), 2))
    return subsets


def _transpose(S: MultipartiteState, subset) -> MultipartiteState:
    return partial_transpose(S, list(subset)) if subset else S


def _structure_of(S1, S2, tol_cluster):
    sp1, sp2 = eig_hermitian(S1), eig_hermitian(S2)
    return sp1, sp2, group_spectrum(0.5 * (sp1.values + sp2.values), tol_cluster)


def pt_select(S1: MultipartiteState, S2: MultipartiteState, tol_cluster: float = TOL_CLUSTER):
    """Pick the subset of subsystems whose partial transpose (applied to both
    states) leaves the fewest degenerate eigenvalues.

    Ranks candidates by number of eigenvalue blocks (more is better), then by
    number of 2-blocks (fewer is better); earlier candidates (identity first)
    win ties.  Returns ``(S1', S2', subset)``.
    """
    if S1.dims != S2.dims:
        raise DimensionError(f"dims differ: {list(S1.dims)} vs {list(S2.dims)}")
    best = None
    for subset in candidate_subsets(S1.n):
        T1 = _transpose(S1, subset)
        vals = np.linalg.eigvalsh(T1.matrix)[::-1]
        st = group_spectrum(vals, tol_cluster)
        key = (-st.r, st.s)
        if best is None or key < best[0]:
            best = (key, subset)
    subset = best[1]
    return _transpose(S1, subset), _transpose(S2, subset), subset


def _undo_transpose(factors, subset):
    return tuple(np.conj(u) if k in subset else u for k, u in enumerate(factors))


def check_equivalence(S1: MultipartiteState, S2: MultipartiteState, cfg: CheckConfig | None = None) -> EquivalenceVerdict:
    """Decide whether ``S2 = (x u_i) S1 (x u_i)^dag`` for local unitaries ``u_i``.

    ``Inequivalent`` only comes from a violated necessary condition;
    ``Equivalent`` always carries a witness verified on the input pair; a
    search that fails to reach its target yields ``Undetermined``.
    """
    cfg = cfg or CheckConfig()
    t0 = time.perf_counter()
    if S1.dims != S2.dims:
        raise DimensionError(f"dims differ: {list(S1.dims)} vs {list(S2.dims)}")

    sp1, sp2 = eig_hermitian(S1), eig_hermitian(S2)
    if not spectra_compatible(sp1, sp2, cfg.tol_spectrum):
        diff = float(np.max(np.abs(sp1.values - sp2.values)))
        return EquivalenceVerdict(
            Verdict.INEQUIVALENT, reason={"condition": "spectrum mismatch", "max_diff": diff}
        )

    report = invariant_screens(S1, S2, cfg.pmax, cfg.tol_cluster, cfg.tol_screen)
    if not report.passed:
        bad = report.failures[0]
        return EquivalenceVerdict(
            Verdict.INEQUIVALENT, reason={"condition": f"{bad.name} mismatch", **bad.detail}
        )

    if cfg.pt == "auto":
        W1, W2, subset = pt_select(S1, S2, cfg.tol_cluster)
    else:
        subset = tuple(sorted(set(int(k) for k in (cfg.pt or ()))))
        for k in subset:
            if not 0 <= k < S1.n:
                raise DimensionError(f"subsystem {k} out of range for {S1.n} subsystems")
        W1, W2 = _transpose(S1, subset), _transpose(S2, subset)

    if subset:
        tp1, tp2 = eig_hermitian(W1), eig_hermitian(W2)
        if not spectra_compatible(tp1, tp2, cfg.tol_spectrum):
            diff = float(np.max(np.abs(tp1.values - tp2.values)))
            return EquivalenceVerdict(
                Verdict.INEQUIVALENT,
                reason={"condition": "partial-transpose spectrum mismatch", "max_diff": diff},
                pt_subset=subset,
            )
    else:
        tp1, tp2 = sp1, sp2
    structure = group_spectrum(0.5 * (tp1.values + tp2.values), cfg.tol_cluster)

    res = search_gauge(tp1.basis, tp2.basis, S1.dims, structure, cfg.search)
    stats = {
        "stage": res.stage,
        "restarts": res.restarts,
        "iterations": res.iterations,
        "grid_points": res.grid_points,
        "best_objective": res.objective,
        "seconds": res.seconds,
        "block_sizes": list(structure.sizes),
    }
    if res.objective <= cfg.search.objective_target:
        W = tp1.basis @ res.gauge.matrix @ tp2.basis.conj().T
        try:
            fac = factor_local_unitary(W, S1.dims, cfg.search.tol_rank)
        except RankError as err:
            stats["factor_error"] = str(err)
        else:
            # X U Y^dag = (x w_i) maps rho_2' to rho_1'; the witness is its adjoint
            factors = tuple(u.conj().T for u in fac.factors)
            factors = _undo_transpose(factors, subset)
            residual = verify_witness(S1, S2, factors)
            stats["seconds_total"] = time.perf_counter() - t0
            if residual <= cfg.tol_verify:
                witness = LocalUnitaryFactorization(factors, fac.residual)
                return EquivalenceVerdict(Verdict.EQUIVALENT, witness, residual, stats, subset)
            stats["verify_residual"] = residual
    stats["seconds_total"] = time.perf_counter() - t0
    return EquivalenceVerdict(Verdict.UNDETERMINED, None, None, stats, subset)
