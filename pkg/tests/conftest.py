import numpy as np
import pytest

from lueq import MultipartiteState
from lueq.examples import bell_mixture_pair, three_qubit_pair
from lueq.io import haar_unitary

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def realign_bruteforce(Z, M, N):
    """Realignment straight from the definition: rows are vec(Z_ij) with the
    block index running down columns first."""
    rows = []
    for j in range(M):
        for i in range(M):
            block = Z[i * N : (i + 1) * N, j * N : (j + 1) * N]
            rows.append([block[k, l] for l in range(N) for k in range(N)])
    return np.array(rows)


def kron_bruteforce(A, B):
    m, n = A.shape
    p, q = B.shape
    out = np.zeros((m * p, n * q), dtype=complex)
    for i in range(m):
        for j in range(n):
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = A[i, j] * B[k, l]
    return out


def random_density(d, rng, rank=None):
    rank = rank or d
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


def random_complex(shape, rng):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ex1():
    rho1, rho2, X, Y, U = bell_mixture_pair()
    return {
        "S1": MultipartiteState(rho1, [2, 2]),
        "S2": MultipartiteState(rho2, [2, 2]),
        "X": X,
        "Y": Y,
        "U": U,
    }


@pytest.fixture
def ex2():
    rho1, rho2, X, Y, values = three_qubit_pair(2, 3, 5)
    return {
        "S1": MultipartiteState(rho1, [2, 2, 2]),
        "S2": MultipartiteState(rho2, [2, 2, 2]),
        "X": X,
        "Y": Y,
        "values": values,
        "theta": np.array([0, 0, 0, np.pi, np.pi, 0, np.pi, 0]),
    }


__all__ = ["SWAP", "haar_unitary", "kron_bruteforce", "random_complex", "random_density", "realign_bruteforce"]
