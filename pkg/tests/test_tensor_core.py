import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lueq import DimensionError, MultipartiteState, StateMode, StateValidationError
from lueq.tensor_core import (
    partial_trace,
    partial_transpose,
    partial_transpose_matrix,
    permute_subsystems,
    realign,
    realign_bipartition,
    tensor_product,
    unrealign,
    unrealign_bipartition,
    unvec,
    vec,
)
from lueq.examples import degenerate_corner_state

from conftest import SWAP, haar_unitary, kron_bruteforce, random_complex, random_density, realign_bruteforce

seeds = st.integers(0, 2**32 - 1)


def test_vec_column_stacking():
    assert vec(np.array([[1, 2], [3, 4]])).tolist() == [1, 3, 2, 4]
    assert vec(np.eye(2)).tolist() == [1, 0, 0, 1]


def test_unvec_examples():
    assert np.array_equal(unvec(np.array([1, 3, 2, 4]), 2, 2), [[1, 2], [3, 4]])
    assert np.array_equal(unvec(np.array([1, 0, 0, 1]), 2, 2), np.eye(2))
    v = np.array([-1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(unvec(np.sqrt(2) * v, 2, 2), np.diag([-1, 1]))


def test_unvec_length_mismatch():
    with pytest.raises(DimensionError):
        unvec(np.arange(5), 2, 2)


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_vec_unvec_inverse(seed, m, n):
    A = random_complex((m, n), np.random.default_rng(seed))
    assert np.array_equal(unvec(vec(A), m, n), A)
    v = vec(A)
    assert np.array_equal(vec(unvec(v, m, n)), v)


def test_realign_matches_definition(rng):
    Z = random_complex((6, 6), rng)
    assert np.array_equal(realign(Z, 2, 3), realign_bruteforce(Z, 2, 3))
    assert np.array_equal(realign(Z, 3, 2), realign_bruteforce(Z, 3, 2))


def test_realign_identity_is_rank_one():
    R = realign(np.eye(4), 2, 2)
    assert np.array_equal(R, np.outer(vec(np.eye(2)), vec(np.eye(2))))
    assert np.linalg.matrix_rank(R) == 1


def test_realign_swap_rank_four():
    # oracle: definition-level realignment, then SVD
    s = np.linalg.svd(realign_bruteforce(SWAP, 2, 2), compute_uv=False)
    assert np.allclose(s, [1, 1, 1, 1])
    assert np.linalg.matrix_rank(realign(SWAP, 2, 2)) == 4


def test_realign_shape_mismatch():
    with pytest.raises(DimensionError):
        realign(np.eye(6), 2, 2)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_realign_of_kron_is_outer_of_vecs(seed, m, n):
    rng = np.random.default_rng(seed)
    A, B = random_complex((m, m), rng), random_complex((n, n), rng)
    assert np.array_equal(realign(np.kron(A, B), m, n), np.outer(vec(A), vec(B)))


@given(seeds)
def test_realign_is_entry_permutation(seed):
    Z = random_complex((6, 6), np.random.default_rng(seed))
    R = realign(Z, 3, 2)
    assert np.linalg.norm(R) == pytest.approx(np.linalg.norm(Z), rel=1e-14)
    assert sorted(R.ravel().tolist(), key=lambda z: (z.real, z.imag)) == sorted(
        Z.ravel().tolist(), key=lambda z: (z.real, z.imag)
    )
    assert np.array_equal(unrealign(R, 3, 2), Z)


def test_tensor_product_examples():
    assert np.array_equal(tensor_product([np.eye(2), np.eye(2)]), np.eye(4))
    s = 1 / np.sqrt(2)
    A = np.diag([-1, 1])
    B = np.array([[1, 1], [-1, 1]]) * s
    expected = np.array([[-s, -s, 0, 0], [s, -s, 0, 0], [0, 0, s, s], [0, 0, -s, s]])
    assert np.allclose(tensor_product([A, B]), expected)
    with pytest.raises(DimensionError):
        tensor_product([])


def test_tensor_product_matches_bruteforce(rng):
    A, B = random_complex((3, 3), rng), random_complex((2, 2), rng)
    assert np.allclose(tensor_product([A, B]), kron_bruteforce(A, B))
    assert np.array_equal(realign(tensor_product([A, B]), 3, 2), np.outer(vec(A), vec(B)))


def test_permute_subsystems_swaps_factors(rng):
    A, B, C = random_complex((2, 2), rng), random_complex((3, 3), rng), random_complex((2, 2), rng)
    T = tensor_product([A, B, C])
    assert np.allclose(permute_subsystems(T, [2, 3, 2], [1, 0, 2]), tensor_product([B, A, C]))
    assert np.allclose(permute_subsystems(T, [2, 3, 2], [2, 0, 1]), tensor_product([C, A, B]))


def test_realign_bipartition_product_rank_one(rng):
    u, v, w = (haar_unitary(2, rng) for _ in range(3))
    T = tensor_product([u, v, w])
    for i in range(3):
        assert np.linalg.matrix_rank(realign_bipartition(T, [2, 2, 2], i), tol=1e-10) == 1


def test_realign_bipartition_first_cut_is_plain_realign(rng):
    T = random_complex((12, 12), rng)
    assert np.array_equal(realign_bipartition(T, [3, 2, 2], 0), realign(T, 3, 4))
    for i in range(3):
        assert np.array_equal(unrealign_bipartition(realign_bipartition(T, [3, 2, 2], i), [3, 2, 2], i), T)


def test_realign_bipartition_haar_not_product(rng):
    U = haar_unitary(6, rng)
    s = np.linalg.svd(realign_bipartition(U, [2, 3], 1), compute_uv=False)
    assert s[1] > 1e-3


def test_realign_bipartition_index_range():
    with pytest.raises(DimensionError):
        realign_bipartition(np.eye(8), [2, 2, 2], 3)


def test_partial_transpose_product_state(rng):
    a, b = random_density(2, rng), random_density(3, rng)
    S = MultipartiteState(np.kron(a, b), [2, 3])
    T = partial_transpose(S, 1)
    assert T.mode is StateMode.HERMITIAN
    assert np.allclose(T.matrix, np.kron(a, b.T))


def test_partial_transpose_manual_entries():
    rho = np.arange(16).reshape(4, 4).astype(complex)
    expected = np.array([[0, 1, 8, 9], [4, 5, 12, 13], [2, 3, 10, 11], [6, 7, 14, 15]])
    assert np.array_equal(partial_transpose_matrix(rho, [2, 2], 0), expected)


@given(seeds, st.sampled_from([[3, 3], [2, 3], [2, 2, 2]]))
def test_partial_transpose_involution(seed, dims):
    rng = np.random.default_rng(seed)
    S = MultipartiteState(random_density(int(np.prod(dims)), rng), dims)
    for k in range(len(dims)):
        T = partial_transpose(S, k)
        assert np.linalg.norm(T.matrix - T.matrix.conj().T) < 1e-12
        assert np.array_equal(partial_transpose(T, k).matrix, S.matrix)


def test_partial_transpose_corner_state():
    S = MultipartiteState(degenerate_corner_state(), [2, 2])
    # by hand: the transpose moves the 1/16 coherence into the middle block
    # [[1/8, 1/16], [1/16, 1/8]], giving 1/8 +- 1/16 alongside 1/4 and 1/2
    ev = np.linalg.eigvalsh(partial_transpose(S, 1).matrix)
    assert np.allclose(ev, [1 / 16, 3 / 16, 1 / 4, 1 / 2])


def test_partial_trace_examples(rng):
    A = random_complex((3, 3), rng)
    assert np.allclose(partial_trace(np.kron(np.eye(2), A), [2, 3], 0), 2 * A)
    a, b = random_density(2, rng), random_complex((3, 3), rng)
    assert np.allclose(partial_trace(np.kron(a, b), [2, 3], 1), a * np.trace(b))


def test_partial_trace_example_one(ex1):
    # by hand: sum of the diagonal 2x2 blocks of rho_1
    assert np.allclose(partial_trace(ex1["S1"].matrix, [2, 2], 0), np.eye(2) / 2)


@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_partial_trace_of_product(seed, m, n):
    rng = np.random.default_rng(seed)
    A, B = random_complex((m, m), rng), random_complex((n, n), rng)
    assert np.allclose(partial_trace(tensor_product([A, B]), [m, n], 1), np.trace(B) * A)
    T = random_complex((m * n, m * n), rng)
    assert np.trace(partial_trace(T, [m, n], 0)) == pytest.approx(np.trace(T))


def test_partial_trace_middle_subsystem(rng):
    A, B, C = random_complex((2, 2), rng), random_complex((3, 3), rng), random_complex((2, 2), rng)
    out = partial_trace(tensor_product([A, B, C]), [2, 3, 2], 1)
    assert np.allclose(out, np.trace(B) * np.kron(A, C))


def test_state_validation():
    with pytest.raises(DimensionError):
        MultipartiteState(np.eye(3) / 3, [2, 2])
    with pytest.raises(DimensionError):
        MultipartiteState(np.eye(2) / 2, [1, 2])
    with pytest.raises(StateValidationError, match="Hermitian"):
        MultipartiteState(np.array([[0.5, 1], [0, 0.5]]), [2])
    with pytest.raises(StateValidationError, match="trace"):
        MultipartiteState(np.eye(4) / 2, [2, 2])
    with pytest.raises(StateValidationError, match="positive"):
        MultipartiteState(np.diag([1.5, -0.5]), [2])
    S = MultipartiteState(np.diag([1.5, -0.5]), [2], StateMode.HERMITIAN)
    assert S.mode is StateMode.HERMITIAN
    with pytest.raises(ValueError):
        S.matrix[0, 0] = 3
