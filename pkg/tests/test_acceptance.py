"""End-to-end acceptance checks.  Each test prints one PASS/FAIL line."""

import time

import numpy as np
import pytest

from lueq import CheckConfig, MultipartiteState, SearchConfig, Verdict, check_equivalence, random_pair, verify_witness
from lueq.gauge_search import GaugeProblem, GaugeUnitary, assemble_gauge, gauge_objective, search_gauge
from lueq.realign_factor import factor_local_unitary, realignment_svd
from lueq.spectral import GaugeBlockStructure
from lueq.tensor_core import (
    partial_transpose_matrix,
    permute_subsystems,
    realign,
    realign_bipartition,
    tensor_product,
    unvec,
    vec,
)

from conftest import haar_unitary, random_complex

S2 = 1 / np.sqrt(2)


@pytest.fixture
def report(request, capsys):
    """Call ``report(ok, detail)`` once per criterion."""

    def emit(ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {request.node.name}: {detail}")
        assert ok, detail

    return emit


def same_up_to_phase(a, b, tol=1e-8):
    a, b = np.asarray(a), np.asarray(b)
    c = np.vdot(a, b)
    if abs(c) < 1e-12:
        return False
    return np.linalg.norm(a * (c / abs(c)) - b) <= tol * max(1.0, np.linalg.norm(b))


def commutes(W, rho, tol=1e-8):
    return np.linalg.norm(W @ rho - rho @ W) <= tol


def test_criterion_1_example_one(ex1, report):
    S1, S2_ = ex1["S1"], ex1["S2"]
    t0 = time.perf_counter()
    v = check_equivalence(S1, S2_, CheckConfig(search=SearchConfig(workers=1)))
    dt = time.perf_counter() - t0
    ok = v.kind is Verdict.EQUIVALENT and v.residual <= 1e-8 and dt < 1.0
    # reference factors, in the orientation rho_2 = W rho_1 W^dag
    A = np.diag([-1.0, 1.0])
    B = np.array([[1.0, 1.0], [-1.0, 1.0]]) * S2
    ref = [A.conj().T, B.conj().T]
    ok &= verify_witness(S1, S2_, ref) <= 1e-8
    # rho_1 has a continuous local symmetry group (it commutes with x(theta) x x(phi)
    # rotations), so witnesses form a family; ours must differ from the
    # reference one by a local symmetry of rho_1
    Wp, Wo = tensor_product(ref), tensor_product(v.witness.factors)
    ok &= commutes(Wp.conj().T @ Wo, S1.matrix)
    report(ok, f"verdict={v.kind.value} residual={v.residual:.1e} t={dt:.3f}s")


def test_criterion_2_example_two(ex2, report):
    S1, S2_, X, Y = ex2["S1"], ex2["S2"], ex2["X"], ex2["Y"]
    t0 = time.perf_counter()
    v = check_equivalence(S1, S2_, CheckConfig(search=SearchConfig(workers=1)))
    dt = time.perf_counter() - t0
    ok = v.kind is Verdict.EQUIVALENT and v.residual <= 1e-8 and dt < 5.0
    # the grid alone, on the hand-derived eigenbases with the
    # all-distinct block structure
    prob = GaugeProblem(X, Y, [2, 2, 2], GaugeBlockStructure.from_sizes([1] * 8))
    cands, _ = prob.phase_grid(8, zero_tol=1e-12)
    zeros = [np.concatenate([[0.0], x]) for x, f in cands if f <= 1e-12]
    ok &= any(np.allclose(np.angle(np.exp(1j * z)), np.angle(np.exp(1j * ex2["theta"]))) for z in zeros)
    res = search_gauge(X, Y, [2, 2, 2], GaugeBlockStructure.from_sizes([1] * 8), SearchConfig(workers=1))
    ok &= res.stage == "grid"
    W = X @ GaugeUnitary.from_phases(ex2["theta"]).matrix @ Y.conj().T
    sigma1 = realignment_svd(W, 2, 4).sigma[0]
    ok &= abs(sigma1 - 2 * np.sqrt(2)) <= 1e-10
    fac = factor_local_unitary(W, [2, 2, 2])
    expected = [np.eye(2), np.array([[1, -1], [1, 1]]) * S2, np.eye(2)]
    ok &= all(same_up_to_phase(u, e) for u, e in zip(fac.factors, expected))
    # pipeline witness is the adjoint orientation of the same factors
    ok &= all(same_up_to_phase(u, e.conj().T) for u, e in zip(v.witness.factors, expected))
    report(ok, f"verdict={v.kind.value} sigma1={sigma1:.12f} grid_solutions={len(zeros)} t={dt:.3f}s")


@pytest.mark.slow
def test_criterion_3_partial_transpose_consistency(report):
    failures = 0
    count = 0
    for dims in ([2, 2], [2, 2, 2]):
        for seed in range(50):
            S1, S2_, _ = random_pair(dims, 1000 + seed)
            base = check_equivalence(S1, S2_, CheckConfig(pt=None, search=SearchConfig(workers=1)))
            good = base.kind is Verdict.EQUIVALENT and verify_witness(S1, S2_, base.witness) <= 1e-8
            for k in range(len(dims)):
                v = check_equivalence(S1, S2_, CheckConfig(pt=[k], search=SearchConfig(workers=1)))
                good &= v.kind is Verdict.EQUIVALENT and verify_witness(S1, S2_, v.witness) <= 1e-8
                if good:
                    good &= all(
                        same_up_to_phase(a, b) for a, b in zip(v.witness.factors, base.witness.factors)
                    )
            failures += not good
            count += 1
    report(failures == 0, f"{count - failures}/{count} pairs consistent across pt choices")


@pytest.mark.slow
def test_criterion_4_oracle_soundness(report):
    t0 = time.perf_counter()
    lines = []
    ok = True
    for dims in ([2, 2], [2, 3], [2, 2, 2]):
        tally = {k: 0 for k in Verdict}
        for seed in range(200):
            S1, S2_, _ = random_pair(dims, seed)
            tally[check_equivalence(S1, S2_).kind] += 1
        ok &= tally[Verdict.EQUIVALENT] >= 198 and tally[Verdict.INEQUIVALENT] == 0
        lines.append(f"{dims}: {tally[Verdict.EQUIVALENT]}/200 eq, {tally[Verdict.UNDETERMINED]} undet")
    ineq = 0
    for seed in range(200):
        dims = ([2, 2], [2, 3], [2, 2, 2])[seed % 3]
        S1, S2_, _ = random_pair(dims, 5000 + seed, shift=1e-3)
        ineq += check_equivalence(S1, S2_).kind is Verdict.INEQUIVALENT
    ok &= ineq == 200
    dt = time.perf_counter() - t0
    ok &= dt < 300
    report(ok, "; ".join(lines) + f"; shifted {ineq}/200 ineq; t={dt:.1f}s")


@pytest.mark.slow
def test_criterion_5_degenerate_profile(report):
    out = {}
    for pt in (None, "auto"):
        eq = ineq = 0
        for seed in range(100):
            S1, S2_, _ = random_pair([2, 2], 200 + seed, profile=[2, 2])
            v = check_equivalence(S1, S2_, CheckConfig(pt=pt))
            eq += v.kind is Verdict.EQUIVALENT and v.residual <= 1e-7
            ineq += v.kind is Verdict.INEQUIVALENT
        out[pt] = (eq, ineq)
    ok = all(eq >= 95 and ineq == 0 for eq, ineq in out.values())
    report(ok, f"pt none: {out[None][0]}/100 eq; pt auto: {out['auto'][0]}/100 eq; inequivalent {out[None][1] + out['auto'][1]}")


def test_criterion_6_property_suites(report):
    rng = np.random.default_rng(20261014)
    n_inst = 100
    passed = {}

    def run(name, check):
        passed[name] = sum(bool(check()) for _ in range(n_inst))

    def realign_norm():
        M, N = rng.integers(2, 5, size=2)
        Z = random_complex((M * N, M * N), rng)
        R = realign(Z, M, N)
        return np.isclose(np.linalg.norm(R), np.linalg.norm(Z)) and np.allclose(
            np.sort(np.abs(R).ravel()), np.sort(np.abs(Z).ravel())
        )

    def realign_kron():
        M, N = rng.integers(2, 5, size=2)
        A, B = random_complex((M, M), rng), random_complex((N, N), rng)
        return np.allclose(realign(np.kron(A, B), M, N), np.outer(vec(A), vec(B)))

    def pt_involution():
        dims = list(rng.integers(2, 4, size=rng.integers(2, 4)))
        T = random_complex((int(np.prod(dims)),) * 2, rng)
        sub = [int(k) for k in range(len(dims)) if rng.random() < 0.5] or [0]
        return np.array_equal(partial_transpose_matrix(partial_transpose_matrix(T, dims, sub), dims, sub), T)

    def vec_unvec():
        r, c = rng.integers(1, 6, size=2)
        A = random_complex((r, c), rng)
        v = random_complex(r * c, rng)
        return np.array_equal(unvec(vec(A), r, c), A) and np.array_equal(vec(unvec(v, r, c)), v)

    def factor_round_trip():
        dims = [int(d) for d in rng.integers(2, 4, size=rng.integers(2, 4))]
        us = [haar_unitary(d, rng) for d in dims]
        fac = factor_local_unitary(tensor_product(us), dims)
        return fac.residual <= 1e-10 and all(same_up_to_phase(a, b) for a, b in zip(fac.factors, us))

    def gauge_unitary():
        sizes = [int(m) for m in rng.integers(1, 4, size=rng.integers(1, 5))]
        sizes += [1] * (sum(sizes) < 2)
        st = GaugeBlockStructure.from_sizes(sizes)
        prob = GaugeProblem(np.eye(st.dim), np.eye(st.dim), [st.dim], st)
        U = assemble_gauge(prob.to_gauge(prob.random_point(rng)))
        return np.allclose(U.conj().T @ U, np.eye(st.dim), atol=1e-12)

    def phase_invariance():
        dims = [2, 2] if rng.random() < 0.5 else [2, 3]
        d = int(np.prod(dims))
        X, Y = haar_unitary(d, rng), haar_unitary(d, rng)
        st = GaugeBlockStructure.from_sizes([1] * (d - 2) + [2])
        prob = GaugeProblem(X, Y, dims, st)
        g = prob.to_gauge(prob.random_point(rng))
        f0 = gauge_objective(X, Y, dims, g)
        phi = rng.uniform(0, 2 * np.pi)
        f1 = gauge_objective(np.exp(1j * phi) * X, Y, dims, g)
        return np.isclose(f0, f1, rtol=1e-9, atol=1e-14)

    def permutation_round_trip():
        dims = [int(d) for d in rng.integers(2, 4, size=3)]
        order = list(rng.permutation(3))
        T = random_complex((int(np.prod(dims)),) * 2, rng)
        inv = list(np.argsort(order))
        back = permute_subsystems(permute_subsystems(T, dims, order), [dims[k] for k in order], inv)
        return np.array_equal(back, T)

    for name, fn in [
        ("realign_norm", realign_norm),
        ("realign_kron", realign_kron),
        ("pt_involution", pt_involution),
        ("vec_unvec", vec_unvec),
        ("factor_round_trip", factor_round_trip),
        ("gauge_unitary", gauge_unitary),
        ("phase_invariance", phase_invariance),
        ("permutation_round_trip", permutation_round_trip),
    ]:
        run(name, fn)
    ok = all(v == n_inst for v in passed.values())
    report(ok, ", ".join(f"{k} {v}/{n_inst}" for k, v in passed.items()))


def test_criterion_7_example_one_sigma(ex1, report):
    X, Y, U = ex1["X"], ex1["Y"], ex1["U"]
    W = X @ U @ Y.conj().T
    sigma = realignment_svd(W, 2, 2).sigma
    ok = abs(sigma[0] - 2.0) <= 1e-10 and np.allclose(sigma[1:], 0, atol=1e-10)
    # independently of the hand-derived gauge, any product of two qubit
    # unitaries has sigma_1 = sqrt(M N) = 2
    v = check_equivalence(ex1["S1"], ex1["S2"])
    s2 = realignment_svd(tensor_product(v.witness.factors), 2, 2).sigma[0]
    ok &= abs(s2 - 2.0) <= 1e-10
    report(ok, f"sigma={np.round(sigma, 12).tolist()} (not 1/2 with multiplicity 2)")
