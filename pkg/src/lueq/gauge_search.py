"""Block-diagonal gauge unitaries and the search for a product-form ``X U Y^dag``.

Two eigenbases ``X`` and ``Y`` of equal spectra are related by a local
unitary exactly when some block-diagonal ``U`` (one unitary block per
eigenvalue cluster) makes ``X U Y^dag`` a tensor product.  The search
minimises the summed rank-one deficiency of its realignments over all cuts.

Block parameterisations
-----------------------
* multiplicity 1: ``[theta]``, block ``exp(i theta)``.
* multiplicity 2: ``[t, z1, z2, z3]`` or ``[t, z1, z2, z3, phi]``, block
  ``exp(i phi) [[t + i z3, z1 + i z2], [-z1 + i z2, t - i z3]]`` with
  ``t^2 + |z|^2 = 1``.
* multiplicity m >= 3: ``m*m`` reals filling a Hermitian ``H`` (diagonal
  first, then real/imaginary parts of the upper triangle row by row), block
  ``expm(i H)``.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .realign_factor import TOL_RANK, rank_one_deficiency
from .spectral import GaugeBlockStructure
from .tensor_core import DimensionError, check_dims, realign_bipartition, unrealign_bipartition

GRID_PHASES = np.array([0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi])
MAX_GRID_BLOCKS = 12

_J = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [-1, 0]],
        [[0, 1j], [1j, 0]],
        [[1j, 0], [0, -1j]],
    ],
    dtype=complex,
)


def default_workers() -> int:
    cap = os.environ.get("LUEQ_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


@dataclass
class SearchConfig:
    tol_rank: float = TOL_RANK
    max_restarts: int = 64
    max_iterations: int = 500
    seed: int = 0
    discrete_phase_grid: bool = True
    objective_target: float = 1e-10
    grid_seeds: int = 8
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        for name in ("max_restarts", "max_iterations", "grid_seeds", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class GaugeUnitary:
    structure: GaugeBlockStructure
    params: tuple[np.ndarray, ...]

    @classmethod
    def identity(cls, structure: GaugeBlockStructure) -> "GaugeUnitary":
        params = []
        for m in structure.sizes:
            if m == 1:
                params.append(np.zeros(1))
            elif m == 2:
                params.append(np.array([1.0, 0, 0, 0, 0]))
            else:
                params.append(np.zeros(m * m))
        return cls(structure, tuple(params))

    @classmethod
    def from_phases(cls, theta) -> "GaugeUnitary":
        theta = np.asarray(theta, dtype=float)
        structure = GaugeBlockStructure.from_sizes([1] * theta.size)
        return cls(structure, tuple(np.array([t]) for t in theta))

    @property
    def matrix(self) -> np.ndarray:
        return assemble_gauge(self)


def su2_block(t, z1, z2, z3) -> np.ndarray:
    return np.array([[t + 1j * z3, z1 + 1j * z2], [-z1 + 1j * z2, t - 1j * z3]])


def hermitian_from_params(p: np.ndarray, m: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size != m * m:
        raise ValueError(f"a {m}x{m} block needs {m * m} generator parameters, got {p.size}")
    H = np.diag(p[:m]).astype(complex)
    iu = np.triu_indices(m, 1)
    off = p[m::2] + 1j * p[m + 1 :: 2]
    H[iu] = off
    H[iu[1], iu[0]] = off.conj()
    return H


def _two_block(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size not in (4, 5):
        raise ValueError(f"a 2x2 block takes 4 or 5 parameters, got {p.size}")
    q = p[:4]
    norm2 = float(q @ q)
    if abs(norm2 - 1) > 1e-12:
        if abs(norm2 - 1) > 1e-6:
            raise ValueError(f"2x2 block parameters not normalized: t^2 + |z|^2 = {norm2:.9g}")
        q = q / np.sqrt(norm2)
    phi = p[4] if p.size == 5 else 0.0
    return np.exp(1j * phi) * su2_block(*q)


def assemble_gauge(g: GaugeUnitary) -> np.ndarray:
    """Block-diagonal unitary described by ``g``."""
    sizes = g.structure.sizes
    if len(g.params) != len(sizes):
        raise ValueError(f"{len(g.params)} parameter blocks for {len(sizes)} eigenvalue blocks")
    blocks = []
    for m, p in zip(sizes, g.params):
        p = np.asarray(p, dtype=float)
        if m == 1:
            blocks.append(np.array([[np.exp(1j * p.reshape(-1)[0])]]))
        elif m == 2:
            blocks.append(_two_block(p))
        else:
            blocks.append(scipy.linalg.expm(1j * hermitian_from_params(p, m)))
    return scipy.linalg.block_diag(*blocks)


class GaugeProblem:
    """Objective ``X -> sum_i deficiency_i(X U(x) Y^dag)`` over free coordinates ``x``.

    Free coordinates: one phase per 1-block, four unnormalised sphere
    coordinates plus a phase per 2-block, ``m*m`` generator entries per larger
    block.  The leading block's phase is gauge-fixed to zero.
    """

    def __init__(self, X, Y, dims, structure: GaugeBlockStructure):
        self.dims = check_dims(dims)
        self.X = np.asarray(X, dtype=complex)
        self.Y = np.asarray(Y, dtype=complex)
        self.Yh = self.Y.conj().T
        self.structure = structure
        d = self.X.shape[0]
        if self.X.shape != (d, d) or self.Y.shape != (d, d):
            raise DimensionError(f"X and Y must be square of equal size, got {self.X.shape}, {self.Y.shape}")
        if structure.dim != d:
            raise DimensionError(f"block structure covers {structure.dim} columns, bases have {d}")
        if int(np.prod(self.dims)) != d:
            raise DimensionError(f"dims {list(self.dims)} do not match basis size {d}")
        # cut 1 of a bipartite matrix has the same singular values as cut 0
        self.cuts = [0] if len(self.dims) == 2 else list(range(len(self.dims)))
        self.cut_weight = 2.0 if len(self.dims) == 2 else 1.0

        self.slots = []  # (kind, block index, offset, size, coordinate slice)
        pos = 0
        for b, (m, off) in enumerate(zip(structure.sizes, structure.offsets)):
            if m == 1:
                n = 0 if b == 0 else 1
                kind = "phase"
            elif m == 2:
                n = 4 if b == 0 else 5
                kind = "su2"
            else:
                n = m * m
                kind = "expm"
            self.slots.append((kind, b, off, m, slice(pos, pos + n)))
            pos += n
        self.nparams = pos

    # coordinates <-> GaugeUnitary -------------------------------------------------
    def to_gauge(self, x) -> GaugeUnitary:
        x = np.asarray(x, dtype=float)
        params = []
        for kind, b, off, m, sl in self.slots:
            v = x[sl]
            if kind == "phase":
                params.append(np.array([v[0] if v.size else 0.0]))
            elif kind == "su2":
                q = v[:4] / np.linalg.norm(v[:4])
                phi = v[4] if v.size == 5 else 0.0
                params.append(np.append(q, phi))
            else:
                params.append(v.copy())
        return GaugeUnitary(self.structure, tuple(params))

    def from_gauge(self, g: GaugeUnitary) -> np.ndarray:
        """Coordinates of ``g`` after removing its global phase (so the leading
        block's phase is zero)."""
        first = np.asarray(g.params[0], dtype=float)
        kind0 = self.slots[0][0]
        if kind0 == "phase":
            glob = first[0]
        elif kind0 == "su2":
            glob = first[4] if first.size == 5 else 0.0
        else:
            glob = 0.0
        x = np.zeros(self.nparams)
        for (kind, b, off, m, sl), p in zip(self.slots, g.params):
            p = np.asarray(p, dtype=float)
            if kind == "phase":
                if sl.stop > sl.start:
                    x[sl] = p[0] - glob
            elif kind == "su2":
                full = np.append(p[:4], (p[4] if p.size == 5 else 0.0) - glob)
                x[sl] = full[: sl.stop - sl.start]
            else:
                v = p.copy()
                v[:m] -= glob
                x[sl] = v
        return x

    def identity_point(self) -> np.ndarray:
        return self.from_gauge(GaugeUnitary.identity(self.structure))

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        x = np.zeros(self.nparams)
        for kind, b, off, m, sl in self.slots:
            n = sl.stop - sl.start
            if kind == "phase":
                x[sl] = rng.uniform(0, 2 * np.pi, n)
            elif kind == "su2":
                q = rng.normal(size=4)
                x[sl.start : sl.start + 4] = q / np.linalg.norm(q)
                if n == 5:
                    x[sl.stop - 1] = rng.uniform(0, 2 * np.pi)
            else:
                x[sl] = rng.normal(scale=np.pi / 2, size=n)
        return x

    # evaluation -------------------------------------------------------------------
    def _blocks(self, x):
        out = []
        for kind, b, off, m, sl in self.slots:
            v = x[sl]
            if kind == "phase":
                th = v[0] if v.size else 0.0
                out.append(np.array([[np.exp(1j * th)]]))
            elif kind == "su2":
                n = v[:4] / np.linalg.norm(v[:4])
                phi = v[4] if v.size == 5 else 0.0
                out.append(np.exp(1j * phi) * np.tensordot(n, _J, axes=1))
            else:
                out.append(scipy.linalg.expm(1j * hermitian_from_params(v, m)))
        return out

    def unitary(self, x) -> np.ndarray:
        return scipy.linalg.block_diag(*self._blocks(np.asarray(x, dtype=float)))

    def product(self, x) -> np.ndarray:
        """``X U(x) Y^dag``."""
        return self.X @ self.unitary(x) @ self.Yh

    def deficiencies(self, x) -> np.ndarray:
        W = self.product(x)
        return np.array(
            [
                rank_one_deficiency(np.linalg.svd(realign_bipartition(W, self.dims, i), compute_uv=False))
                for i in range(len(self.dims))
            ]
        )

    def value(self, x) -> float:
        return self.value_and_grad(x, grad=False)[0]

    def value_and_grad(self, x, grad: bool = True):
        x = np.asarray(x, dtype=float)
        blocks = self._blocks(x)
        U = scipy.linalg.block_diag(*blocks)
        W = self.X @ U @ self.Yh
        f = 0.0
        GW = np.zeros_like(W) if grad else None
        for i in self.cuts:
            R = realign_bipartition(W, self.dims, i)
            if not grad:
                f += rank_one_deficiency(np.linalg.svd(R, compute_uv=False))
                continue
            u, s, vh = np.linalg.svd(R, full_matrices=False)
            total = float(np.sum(s**2))
            dfc = float(np.sum(s[1:] ** 2) / total)
            f += dfc
            tail = R - s[0] * np.outer(u[:, 0], vh[0])
            GR = (2.0 / total) * (tail - dfc * R)
            GW += unrealign_bipartition(GR, self.dims, i)
        f *= self.cut_weight
        if not grad:
            return f, None
        GW *= self.cut_weight
        # df = Re <C, dU> with C = X^dag G_W Y
        C = self.X.conj().T @ GW @ self.Y
        g = np.zeros(self.nparams)
        for (kind, b, off, m, sl), B in zip(self.slots, blocks):
            Cb = C[off : off + m, off : off + m]
            if kind == "phase":
                if sl.stop > sl.start:
                    g[sl.start] = np.real(np.conj(Cb[0, 0]) * 1j * B[0, 0])
            elif kind == "su2":
                v = x[sl]
                q = v[:4]
                nrm = np.linalg.norm(q)
                n = q / nrm
                phi = v[4] if v.size == 5 else 0.0
                gn = np.real(np.einsum("ab,jab->j", np.conj(Cb), np.exp(1j * phi) * _J))
                g[sl.start : sl.start + 4] = (gn - (gn @ n) * n) / nrm
                if v.size == 5:
                    g[sl.stop - 1] = np.real(np.vdot(Cb, 1j * B))
            else:
                H = hermitian_from_params(x[sl], m)
                K = scipy.linalg.expm_frechet(-1j * H, Cb, compute_expm=False)
                Mi = 1j * np.conj(K)
                gd = np.real(np.diag(Mi))
                iu = np.triu_indices(m, 1)
                gx = np.real(Mi[iu] + Mi[iu[1], iu[0]])
                gy = np.real(1j * Mi[iu] - 1j * Mi[iu[1], iu[0]])
                gv = np.empty(m * m)
                gv[:m] = gd
                gv[m::2] = gx
                gv[m + 1 :: 2] = gy
                g[sl] = gv
        return f, g

    # stage 1 ----------------------------------------------------------------------
    def phase_grid(self, keep: int, zero_tol: float = 0.0, max_zeros: int = 256, chunk: int = 1 << 15):
        """Evaluate all phase assignments over ``{0, pi/2, pi, 3pi/2}`` for the free
        1-block phases, other blocks at identity.

        Returns the ``keep`` best points, plus (up to ``max_zeros``) every point
        with objective at most ``zero_tol``, as ``(coordinates, value)`` pairs
        sorted by value, and the number of points evaluated."""
        free = [(sl.start, off) for kind, b, off, m, sl in self.slots if kind == "phase" and sl.stop > sl.start]
        n_one_dim = sum(1 for m in self.structure.sizes if m == 1)
        if not free or n_one_dim > MAX_GRID_BLOCKS:
            return [], 0
        base_x = self.identity_point()
        free_offsets = {off for _, off in free}
        fixed_cols = [c for c in range(self.X.shape[0]) if c not in free_offsets]
        W0 = self.X[:, fixed_cols] @ self.Yh[fixed_cols, :]
        R0 = [realign_bipartition(W0, self.dims, i) for i in self.cuts]
        Rk = [
            np.stack([realign_bipartition(np.outer(self.X[:, off], self.Yh[off, :]), self.dims, i) for _, off in free])
            for i in self.cuts
        ]
        K = len(free)
        total_pts = 4**K
        best_f = np.full(0, np.inf)
        best_idx = np.zeros(0, dtype=np.int64)
        for start in range(0, total_pts, chunk):
            idx = np.arange(start, min(total_pts, start + chunk), dtype=np.int64)
            digits = (idx[:, None] // (4 ** np.arange(K, dtype=np.int64))[None, :]) % 4
            ph = np.exp(1j * GRID_PHASES[digits])
            f = np.zeros(idx.size)
            for r0, rk in zip(R0, Rk):
                R = r0[None] + np.einsum("bk,kxy->bxy", ph, rk)
                if R.shape[1] > R.shape[2]:
                    R = R.transpose(0, 2, 1)
                gram = R @ R.conj().transpose(0, 2, 1)
                ev = np.linalg.eigvalsh(gram)
                tr = np.sum(ev, axis=1)
                f += np.clip(np.sum(ev[:, :-1], axis=1), 0, None) / tr
            f *= self.cut_weight
            allf = np.concatenate([best_f, f])
            alli = np.concatenate([best_idx, idx])
            order = np.argsort(allf, kind="stable")
            n_keep = max(keep, min(max_zeros, int(np.sum(allf <= zero_tol))))
            order = order[:n_keep]
            best_f, best_idx = allf[order], alli[order]
        out = []
        for fi, ii in zip(best_f, best_idx):
            digits = (ii // (4 ** np.arange(K, dtype=np.int64))) % 4
            x = base_x.copy()
            for (pos, _), dgt in zip(free, digits):
                x[pos] = GRID_PHASES[dgt]
            out.append((x, float(fi)))
        return out, total_pts

    # stage 2 ----------------------------------------------------------------------
    def refine(self, x0, max_iterations: int):
        res = minimize(
            self.value_and_grad,
            np.asarray(x0, dtype=float),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": max_iterations, "ftol": 0.0, "gtol": 1e-30, "maxcor": 20},
        )
        x = self.normalize(res.x)
        return x, self.value(x), int(res.nit)

    def normalize(self, x) -> np.ndarray:
        x = np.array(x, dtype=float)
        for kind, b, off, m, sl in self.slots:
            if kind == "su2":
                q = x[sl.start : sl.start + 4]
                x[sl.start : sl.start + 4] = q / np.linalg.norm(q)
            elif kind == "phase" and sl.stop > sl.start:
                x[sl] = np.mod(x[sl], 2 * np.pi)
        return x


def gauge_objective(X, Y, dims, g: GaugeUnitary) -> float:
    """Sum over all cuts ``i | rest`` of the rank-one deficiency of the
    realignment of ``X U Y^dag``.  Zero exactly when ``X U Y^dag`` is a
    tensor product of local unitaries."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if g.structure.dim != X.shape[0] or X.shape != Y.shape:
        raise DimensionError(f"gauge structure of size {g.structure.dim} does not fit bases {X.shape}, {Y.shape}")
    W = X @ assemble_gauge(g) @ Y.conj().T
    dims = check_dims(dims)
    return float(
        sum(
            rank_one_deficiency(np.linalg.svd(realign_bipartition(W, dims, i), compute_uv=False))
            for i in range(len(dims))
        )
    )


@dataclass
class SearchResult:
    gauge: GaugeUnitary
    objective: float
    stage: str
    restarts: int
    iterations: int
    grid_points: int
    seconds: float
    grid_candidates: list = field(default_factory=list, repr=False)


def search_gauge(X, Y, dims, structure: GaugeBlockStructure, cfg: SearchConfig | None = None) -> SearchResult:
    """Look for gauge parameters making ``X U Y^dag`` a product unitary.

    Stages: an exhaustive quarter-turn phase grid over the 1-blocks (when
    enabled), gradient refinement of the best grid points, then seeded random
    restarts until ``cfg.objective_target`` is met or the restart budget runs
    out.  Always returns the best point found.
    """
    cfg = cfg or SearchConfig()
    t0 = time.perf_counter()
    prob = GaugeProblem(X, Y, dims, structure)
    target = cfg.objective_target
    iterations = 0
    best = (prob.identity_point(), np.inf)

    def done(stage, restarts, grid_points, candidates=()):
        x, f = best
        return SearchResult(
            gauge=prob.to_gauge(x),
            objective=float(f),
            stage=stage,
            restarts=restarts,
            iterations=iterations,
            grid_points=grid_points,
            seconds=time.perf_counter() - t0,
            grid_candidates=list(candidates),
        )

    if prob.nparams == 0:
        best = (prob.identity_point(), prob.value(prob.identity_point()))
        return done("trivial", 0, 0)

    grid_points = 0
    seeds = [prob.identity_point()]
    candidates = []
    if cfg.discrete_phase_grid:
        grid, grid_points = prob.phase_grid(cfg.grid_seeds, zero_tol=target)
        for x, _ in grid:
            f = prob.value(x)
            candidates.append((x, f))
            if f < best[1]:
                best = (x, f)
        if best[1] <= target:
            return done("grid", 0, grid_points, candidates)
        seeds = [x for x, _ in grid[: cfg.grid_seeds]] or seeds
    else:
        f = prob.value(seeds[0])
        best = (seeds[0], f)
        if f <= target:
            return done("identity", 0, 0)

    for x0 in seeds:
        x, f, nit = prob.refine(x0, cfg.max_iterations)
        iterations += nit
        if f < best[1]:
            best = (x, f)
        if best[1] <= target:
            return done("refine", 0, grid_points, candidates)

    starts = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.max_restarts)]
    starts = [prob.random_point(r) for r in starts]

    def run(x0):
        return prob.refine(x0, cfg.max_iterations)

    restarts = 0
    batch = max(1, cfg.workers)
    pool = ThreadPoolExecutor(max_workers=batch) if batch > 1 else None
    try:
        for lo in range(0, len(starts), batch):
            chunk = starts[lo : lo + batch]
            results = list(pool.map(run, chunk)) if pool else [run(chunk[0])]
            for x, f, nit in results:
                restarts += 1
                iterations += nit
                if f < best[1]:
                    best = (x, f)
                if f <= target:
                    return done("restart", restarts, grid_points, candidates)
    finally:
        if pool:
            pool.shutdown()
    return done("exhausted", restarts, grid_points, candidates)


def phase_grid_solutions(X, Y, dims, tol: float = 1e-12) -> list[np.ndarray]:
    """All quarter-turn phase assignments (first phase fixed to 0) whose
    objective is at most ``tol``.  Brute force; for small non-degenerate cases."""
    d = np.asarray(X).shape[0]
    prob = GaugeProblem(X, Y, dims, GaugeBlockStructure.from_sizes([1] * d))
    out = []
    for digits in itertools.product(range(4), repeat=d - 1):
        theta = np.concatenate([[0.0], GRID_PHASES[list(digits)]])
        if prob.value(theta[1:]) <= tol:
            out.append(theta)
    return out
