"""JSON state files and seeded oracle pairs."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .tensor_core import (
    DimensionError,
    MultipartiteState,
    StateMode,
    StateValidationError,
    check_dims,
    tensor_product,
)


class StateFileError(ValueError):
    """Malformed state file."""


def state_to_dict(matrix: np.ndarray, dims, mode: str = "density") -> dict:
    m = np.asarray(matrix, dtype=complex)
    doc = {"dims": [int(d) for d in dims], "mode": str(StateMode(mode).value), "re": m.real.tolist()}
    if np.any(m.imag != 0):
        doc["im"] = m.imag.tolist()
    return doc


def _dump(doc: dict) -> str:
    # repr() of a Python float is the shortest string that round-trips exactly
    return json.dumps(doc, indent=None, separators=(", ", ": "))


def write_matrix(matrix: np.ndarray, dims, path, mode: str = "density") -> None:
    Path(path).write_text(_dump(state_to_dict(matrix, dims, mode)) + "\n")


def write_state(S: MultipartiteState, path) -> None:
    write_matrix(S.matrix, S.dims, path, S.mode.value)


def matrix_from_dict(doc: dict) -> tuple[np.ndarray, tuple[int, ...], StateMode]:
    if not isinstance(doc, dict):
        raise StateFileError("state file must hold a JSON object")
    try:
        dims = check_dims(doc["dims"])
        re = np.array(doc["re"], dtype=float)
    except KeyError as err:
        raise StateFileError(f"missing field {err}") from None
    except (TypeError, ValueError) as err:
        raise StateFileError(f"bad numeric data: {err}") from None
    im = np.array(doc["im"], dtype=float) if doc.get("im") is not None else np.zeros_like(re)
    if re.ndim != 2 or re.shape != im.shape:
        raise StateFileError(f"re/im must be equal-shape 2-D arrays, got {re.shape} and {im.shape}")
    total = int(np.prod(dims))
    if re.shape != (total, total):
        raise DimensionError(f"matrix is {re.shape[0]}x{re.shape[1]} but dims {list(dims)} need {total}x{total}")
    try:
        mode = StateMode(doc.get("mode", "density"))
    except ValueError:
        raise StateFileError(f"unknown mode {doc.get('mode')!r}") from None
    return re + 1j * im, dims, mode


def read_matrix(path) -> tuple[np.ndarray, tuple[int, ...], StateMode]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise StateFileError(f"{path}: invalid JSON ({err})") from None
    return matrix_from_dict(doc)


def parse_state(path, **tols) -> MultipartiteState:
    mat, dims, mode = read_matrix(path)
    return MultipartiteState(mat, dims, mode, **tols)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_spectrum(profile: Sequence[int], rng: np.random.Generator, min_gap: float = 1e-2) -> np.ndarray:
    """Descending eigenvalues with the given multiplicities, summing to one.

    Distinct block values are separated by at least ``min_gap`` relative to
    the largest value (resampled until they are)."""
    profile = [int(m) for m in profile]
    if any(m < 1 for m in profile):
        raise ValueError(f"multiplicities must be >= 1, got {profile}")
    for _ in range(1000):
        vals = rng.uniform(0, 1, len(profile))
        if len(vals) == 1 or np.min(np.diff(np.sort(vals))) > min_gap * vals.max():
            break
    lam = np.repeat(vals, profile)
    lam = lam / lam.sum()
    return np.sort(lam)[::-1]


def random_pair(
    dims: Sequence[int],
    seed: int,
    profile: Sequence[int] | None = None,
    shift: float = 0.0,
):
    """Oracle pair ``(S1, S2, factors)`` with ``S2 = (x u_i) S1 (x u_i)^dag``.

    ``profile`` lists eigenvalue multiplicities (default all ones).  A nonzero
    ``shift`` moves ``shift`` of weight from the smallest to the largest
    eigenvalue of ``S2`` only, producing a pair with mismatched spectra.  When
    the smallest eigenvalue is below ``shift`` the spectrum of ``S2`` is first
    mixed with the identity, so the mismatch can then exceed ``shift``.
    """
    dims = check_dims(dims)
    total = int(np.prod(dims))
    profile = [1] * total if profile is None else [int(m) for m in profile]
    if sum(profile) != total:
        raise ValueError(f"profile {profile} sums to {sum(profile)}, expected {total}")
    rng = np.random.default_rng(seed)
    lam = random_spectrum(profile, rng)
    V = haar_unitary(total, rng)
    factors = tuple(haar_unitary(d, rng) for d in dims)
    rho1 = V @ np.diag(lam) @ V.conj().T
    lam2 = lam.copy()
    if shift:
        if shift * total > 1:
            raise ValueError(f"shift {shift} too large for {total} eigenvalues")
        if lam2[-1] < shift:
            # mix with the maximally mixed state so the smallest value can drop by shift
            t = shift * total
            lam2 = (1 - t) * lam2 + t / total
        lam2[0] += shift
        lam2[-1] -= shift
    W = tensor_product(factors)
    rho2 = W @ V @ np.diag(lam2) @ V.conj().T @ W.conj().T
    rho1 = 0.5 * (rho1 + rho1.conj().T)
    rho2 = 0.5 * (rho2 + rho2.conj().T)
    return MultipartiteState(rho1, dims), MultipartiteState(rho2, dims), factors


__all__ = [
    "StateFileError",
    "StateValidationError",
    "haar_unitary",
    "parse_state",
    "random_pair",
    "read_matrix",
    "write_matrix",
    "write_state",
]
