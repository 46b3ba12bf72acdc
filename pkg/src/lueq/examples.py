"""Worked example states used by the tests, scripts and CLI demos."""

from __future__ import annotations

import numpy as np

_S = 1 / np.sqrt(2)


def bell_mixture_pair():
    """Two degenerate two-qubit states, spectrum (1/2, 1/2, 0, 0), related by a
    local unitary, together with hand-derived eigenbases ``X`` and ``Y`` and a
    block-diagonal gauge ``U`` making ``X U Y^dag`` a product."""
    rho1 = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]]) / 4
    rho2 = np.array([[1, 0, 1, 0], [0, 1, 0, -1], [1, 0, 1, 0], [0, -1, 0, 1]]) / 4
    s = _S
    X = np.array([[s, 0, -s, 0], [0, s, 0, -s], [0, s, 0, s], [s, 0, s, 0]])
    Y = np.array([[s, 0, -s, 0], [0, -s, 0, s], [s, 0, s, 0], [0, s, 0, s]])
    U = np.array([[-s, s, 0, 0], [-s, -s, 0, 0], [0, 0, -s, s], [0, 0, -s, -s]])
    return rho1, rho2, X, Y, U


def three_qubit_pair(a: float = 2.0, b: float = 3.0, c: float = 5.0):
    """Non-degenerate three-qubit pair related by ``I x V x I`` with
    ``V = [[1, 1], [-1, 1]]/sqrt(2)``, and eigenbases ``X``, ``Y`` with columns
    ordered by eigenvalues ``(2, 0, 1/a, a, 1/b, b, 1/c, c)/K``."""
    K = 2 + a + b + c + 1 / a + 1 / b + 1 / c
    rho1 = np.diag([1, a, b, c, 1 / c, 1 / b, 1 / a, 1]).astype(float)
    rho1[0, 7] = rho1[7, 0] = 1
    h = 0.5
    rho2 = np.array(
        [
            [(1 + b) / 2, 0, (b - 1) / 2, 0, 0, h, 0, h],
            [0, (a + c) / 2, 0, (c - a) / 2, 0, 0, 0, 0],
            [(b - 1) / 2, 0, (1 + b) / 2, 0, 0, -h, 0, -h],
            [0, (c - a) / 2, 0, (a + c) / 2, 0, 0, 0, 0],
            [0, 0, 0, 0, 1 / (2 * c) + 1 / (2 * a), 0, 1 / (2 * a) - 1 / (2 * c), 0],
            [h, 0, -h, 0, 0, 1 / (2 * b) + h, 0, h - 1 / (2 * b)],
            [0, 0, 0, 0, 1 / (2 * a) - 1 / (2 * c), 0, 1 / (2 * c) + 1 / (2 * a), 0],
            [h, 0, -h, 0, 0, h - 1 / (2 * b), 0, h + 1 / (2 * b)],
        ]
    )
    s, q = _S, 0.5
    X = np.zeros((8, 8))
    X[0, 0], X[0, 1], X[7, 0], X[7, 1] = s, -s, s, s
    for r, col in [(1, 3), (2, 5), (3, 7), (4, 6), (5, 4), (6, 2)]:
        X[r, col] = 1
    Y = np.array(
        [
            [q, -q, 0, 0, 0, s, 0, 0],
            [0, 0, 0, -s, 0, 0, 0, s],
            [-q, q, 0, 0, 0, s, 0, 0],
            [0, 0, 0, s, 0, 0, 0, s],
            [0, 0, s, 0, 0, 0, -s, 0],
            [q, q, 0, 0, -s, 0, 0, 0],
            [0, 0, s, 0, 0, 0, s, 0],
            [q, q, 0, 0, s, 0, 0, 0],
        ]
    )
    values = np.array([2, 0, 1 / a, a, 1 / b, b, 1 / c, c]) / K
    return rho1 / K, rho2 / K, X, Y, values


def degenerate_corner_state():
    """Two-qubit state with a doubly degenerate eigenvalue whose partial
    transpose is non-degenerate."""
    return np.array(
        [[1 / 4, 0, 0, 1 / 16], [0, 1 / 8, 0, 0], [0, 0, 1 / 8, 0], [1 / 16, 0, 0, 1 / 2]]
    )
