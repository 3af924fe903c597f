"""
Overlap (link) variables between occupied frames on neighbouring grid
points, lattice field strengths, Wilson loops and Berry phases.

Frames are arrays of shape (..., n_orb, n_occ) over a periodic k grid, so
np.roll along a grid axis steps to the neighbouring momentum.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from .errors import GridTooCoarse
from .linalg import dagger, unitary_part
from .models import BlochModel, kgrid, occupied_states


_logger = logging.getLogger(__name__)


def shifted(a: np.ndarray, axis: int, step: int = 1) -> np.ndarray:
    """a evaluated at k + step along a grid axis."""
    return np.roll(a, -step, axis=axis)


def overlaps(frames: np.ndarray, axis: int) -> np.ndarray:
    """M(k) = V(k)^dagger V(k + e_axis)."""
    return dagger(frames) @ shifted(frames, axis)


def abelian_links(frames: np.ndarray, axis: int) -> np.ndarray:
    """det M / |det M|, the U(1) link variable of the occupied bundle."""
    det = np.linalg.det(overlaps(frames, axis))
    size = np.abs(det)
    if np.min(size) < 1e-12:
        raise GridTooCoarse(msg="Occupied frames at neighbouring k points are orthogonal")
    return det / size


def plaquette_field(frames: np.ndarray, axes: Tuple[int, int] = (0, 1)) -> np.ndarray:
    """
    Lattice field strength on each plaquette of the (axes) plane,
        F = arg[U_x(k) U_y(k+x) U_x(k+y)^* U_y(k)^*]  in (-pi, pi].
    Gauge invariant, and its sum over a closed 2D grid is 2 pi times an
    integer.
    """
    ax, ay = axes
    ux = abelian_links(frames, ax)
    uy = abelian_links(frames, ay)
    loop = ux * shifted(uy, ax) * np.conj(shifted(ux, ay)) * np.conj(uy)
    return np.angle(loop)


def berry_curvature(model: BlochModel, grid: int) -> np.ndarray:
    """Plaquette field strength of a 2D model, shape (grid, grid)."""
    frames = occupied_states(model, kgrid(2, grid))
    return plaquette_field(frames)


def loop_points(dim: int, axis: int, k_perp: Sequence[float], grid: int) -> np.ndarray:
    k_perp = list(k_perp)
    if len(k_perp) != dim - 1:
        raise ValueError(f"Need {dim - 1} transverse momenta, got {len(k_perp)}")
    ks = np.zeros((grid, dim))
    ks[:, axis] = 2 * np.pi * np.arange(grid) / grid
    others = [a for a in range(dim) if a != axis]
    for a, val in zip(others, k_perp):
        ks[:, a] = val
    return ks


def wilson_loop(model: BlochModel, axis: int = 0, k_perp: Sequence[float] = (), grid: int = 64) -> np.ndarray:
    """Ordered product of overlap matrices around the loop along axis,
    made unitary."""
    frames = occupied_states(model, loop_points(model.dim, axis, k_perp, grid))
    product = np.eye(model.n_occ, dtype=complex)
    for m in overlaps(frames, 0):
        product = product @ m
    return unitary_part(product)


def wilson_phases(model: BlochModel, axis: int = 0, k_perp: Sequence[float] = (), grid: int = 64) -> np.ndarray:
    """Sorted eigenphases of the Wilson loop (hybrid Wannier centres times 2 pi)."""
    return np.sort(-np.angle(np.linalg.eigvals(wilson_loop(model, axis, k_perp, grid))))


def berry_phase(model: BlochModel, axis: int = 0, k_perp: Sequence[float] = (), grid: int = 64) -> float:
    """Berry (Zak) phase -Im log det W in (-pi, pi]."""
    phase = -np.angle(np.linalg.det(wilson_loop(model, axis, k_perp, grid)))
    if phase <= -np.pi:
        phase += 2 * np.pi
    return float(phase)
