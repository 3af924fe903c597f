"""
Dense linear-algebra kernel shared by the topoband modules: Pauli and
Clifford (gamma) matrices, Hermitian eigensystems, projectors, and the
unitary part of overlap matrices.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from bandcore.dbfutil import SimpleClass
from .errors import NotHermitian, UnsupportedCount


_logger = logging.getLogger(__name__)


HERMITIAN_TOL = 1e-10

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def gamma_matrices(count: int) -> Tuple[np.ndarray, ...]:
    """
    Hermitian matrices of size 2**n obeying {G_a, G_b} = 2 delta_ab for
    count = 2n + 1.  The set for count is built from the set for count - 2
    as sigma_x (x) G_a, followed by sigma_y (x) 1 and sigma_z (x) 1.
    """
    if count not in (3, 5):
        raise UnsupportedCount(msg=f"Gamma count {count} not in (3, 5)", count=count)
    if count == 3:
        return PAULI
    smaller = gamma_matrices(count - 2)
    ident = np.eye(smaller[0].shape[0], dtype=complex)
    return tuple(np.kron(SIGMA_X, g) for g in smaller) + \
        (np.kron(SIGMA_Y, ident), np.kron(SIGMA_Z, ident))


def hermiticity_violation(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))), initial=0.0))


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    violation = hermiticity_violation(h)
    if violation > tol * scale:
        raise NotHermitian(msg=f"Hermiticity violated by {violation:.3g}", violation=violation)


class EigenSystem(SimpleClass):
    """Ascending real eigenvalues and the matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __init__(self, values, vectors):
        super().__init__(values=values, vectors=vectors)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def gap_above(self, n: int) -> float:
        return float(self.values[n] - self.values[n - 1])

    def __len__(self):
        return len(self.values)


class Projector(SimpleClass):

    matrix: np.ndarray
    rank: int

    def __init__(self, matrix, rank):
        super().__init__(matrix=matrix, rank=rank)

    @classmethod
    def from_columns(cls, columns: np.ndarray) -> 'Projector':
        return cls(columns @ columns.conj().T, columns.shape[1])

    def complement(self) -> 'Projector':
        n = self.matrix.shape[0]
        return Projector(np.eye(n) - self.matrix, n - self.rank)


def eigensystem(h: np.ndarray) -> EigenSystem:
    h = np.asarray(h, dtype=complex)
    check_hermitian(h)
    # Symmetrize so round-off in the input cannot leak into the vectors.
    values, vectors = linalg.eigh((h + h.conj().T) / 2)
    return EigenSystem(values, vectors)


def eigh_stack(hs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Batched eigendecomposition over the leading axes."""
    return np.linalg.eigh(hs)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def unitary_part(a: np.ndarray) -> np.ndarray:
    """Closest unitary to each matrix in a stack (polar decomposition, via
    the SVD so that stacks are handled in one call)."""
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, ord=2))


def d_dot_gamma(d: np.ndarray, gammas: Sequence[np.ndarray]) -> np.ndarray:
    """H = sum_a d_a Gamma^a for d of shape (..., count)."""
    return np.einsum('...a,aij->...ij', np.asarray(d, dtype=complex), np.asarray(gammas))
