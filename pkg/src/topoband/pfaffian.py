"""
Pfaffians of even-dimensional antisymmetric matrices.  Small matrices
(up to 8x8, which covers every sewing matrix at desk scale) use the
exact expansion along the first row; larger ones use elimination with
pivoting.
"""

import numpy as np

from .errors import InconsistentInput


EXPANSION_LIMIT = 8


def check_antisymmetric(a: np.ndarray, tol: float = 1e-9) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InconsistentInput(msg=f"Pfaffian needs a square matrix, got {a.shape}")
    if a.shape[0] % 2:
        raise InconsistentInput(msg=f"Pfaffian needs even dimension, got {a.shape[0]}")
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.max(np.abs(a + a.T), initial=0.0) > tol * scale:
        raise InconsistentInput(msg="Matrix is not antisymmetric")


def _expand(a: np.ndarray) -> complex:
    n = a.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        if a[0, j] == 0:
            continue
        rest = [i for i in range(1, n) if i != j]
        total += (-1) ** (j - 1) * a[0, j] * _expand(a[np.ix_(rest, rest)])
    return total


def pfaffian_elimination(a: np.ndarray) -> complex:
    """Block elimination with full pivoting on the 2x2 blocks."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    pf = 1.0
    for k in range(0, n - 1, 2):
        sub = np.abs(a[k:, k:])
        row, col = np.unravel_index(np.argmax(sub), sub.shape)
        row, col = row + k, col + k
        if row != k:
            a[[k, row], :] = a[[row, k], :]
            a[:, [k, row]] = a[:, [row, k]]
            pf = -pf
            if col == k:
                col = row
        if col != k + 1:
            a[[k + 1, col], :] = a[[col, k + 1], :]
            a[:, [k + 1, col]] = a[:, [col, k + 1]]
            pf = -pf
        pivot = a[k, k + 1]
        if abs(pivot) == 0:
            return 0.0
        pf *= pivot
        rest = np.arange(k + 2, n)
        if len(rest):
            u = a[k, rest]
            v = a[k + 1, rest]
            a[np.ix_(rest, rest)] -= (np.outer(u, v) - np.outer(v, u)) / pivot
    return pf


def pfaffian(a) -> complex:
    a = np.asarray(a)
    check_antisymmetric(a)
    if a.shape[0] <= EXPANSION_LIMIT:
        return complex(_expand(a))
    return complex(pfaffian_elimination(a))
