"""
Z2 indices of time-reversal-symmetric insulators (T^2 = -1).

z2_index_2d counts the Berry flux through half the Brillouin zone,
ky in [0, pi], minus the Berry phases of its two boundary lines, in a
gauge where the frames on those lines are time-reversal partners of each
other.  The difference is an exact integer whose parity is the index.
z2_strong_3d applies it to the six TR-invariant planes of a 3D zone.

Two independent routes are provided as well: inversion eigenvalues at
the TRIMs (z2_parity_index, inversion-symmetric models only), and
Pfaffians of the sewing matrix at the TRIMs for a caller-supplied smooth
gauge (trim_pfaffian_product).
"""

import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import (DimensionMismatch, GapClosed, InconsistentInput, NotConverged, NoTimeReversal,
                     OddOccupation)
from .invariants import InvariantResult
from .linalg import dagger, eigh_stack
from .models import GAP_TOL, BlochModel, gap_check, kgrid, occupied_states, trims
from .pfaffian import pfaffian
from .symmetry import SYMMETRY_TOL, verified_operator
from .wilson import shifted


_logger = logging.getLogger(__name__)


def time_reversal_operator(model: BlochModel, u_t: Optional[np.ndarray] = None, grid: int = 8) -> np.ndarray:
    """Unitary part of a verified time reversal with T^2 = -1."""
    check = verified_operator(model, 'TR', u_t, grid)
    if check is None:
        raise NoTimeReversal(msg=f"Model {model.name} has no time-reversal operator")
    if not check.holds:
        raise NoTimeReversal(msg=f"Time reversal fails on {model.name} (violation {check.max_violation:.3g})")
    if check.square != -1:
        raise NoTimeReversal(msg=f"Time reversal on {model.name} squares to {check.square}, need -1")
    if model.n_occ % 2:
        raise OddOccupation(msg=f"n_occ={model.n_occ} is odd", n_occ=model.n_occ)
    return check.candidate.unitary_part


def apply_tr(u_t: np.ndarray, frame: np.ndarray) -> np.ndarray:
    return u_t @ np.conj(frame)


def kramers_frame(occupied: np.ndarray, u_t: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis (v1, T v1, v2, T v2, ...) of an occupied space that
    is closed under T, as at a TRIM.
    """
    n_occ = occupied.shape[1]
    proj = occupied @ dagger(occupied)
    remaining = proj.copy()
    columns = []
    for _ in range(n_occ // 2):
        values, vectors = np.linalg.eigh(remaining)
        v = vectors[:, -1]
        w = proj @ apply_tr(u_t, v)
        w = w / np.linalg.norm(w)
        columns += [v, w]
        remaining = remaining - np.outer(v, v.conj()) - np.outer(w, w.conj())
    return np.stack(columns, axis=1)


def tr_partner_frame(frame: np.ndarray, u_t: np.ndarray) -> np.ndarray:
    """Frame at -k from the frame at k:
    Phi(-k)[:, 2s+1] = T Phi(k)[:, 2s],  Phi(-k)[:, 2s] = -T Phi(k)[:, 2s+1]."""
    image = apply_tr(u_t, frame)
    out = np.empty_like(frame)
    out[..., 1::2] = image[..., 0::2]
    out[..., 0::2] = -image[..., 1::2]
    return out


def _constrain_line(line: np.ndarray, u_t: np.ndarray) -> np.ndarray:
    """Impose the TR gauge on a TR-invariant line of n frames (n even);
    index i and n - i are partners, 0 and n/2 are TRIMs."""
    n = line.shape[0]
    half = n // 2
    out = line.copy()
    out[0] = kramers_frame(line[0], u_t)
    out[half] = kramers_frame(line[half], u_t)
    for i in range(half + 1, n):
        out[i] = tr_partner_frame(out[n - i], u_t)
    return out


def _link_phases(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    det = np.linalg.det(dagger(a) @ b)
    if np.min(np.abs(det)) < 1e-12:
        raise GapClosed(msg="Occupied frames at neighbouring k points are orthogonal; refine the grid")
    return det / np.abs(det)


def half_zone_pump(model: BlochModel, u_t: np.ndarray, grid: int) -> float:
    """
    (sum of half-zone plaquette fields - boundary Berry phases) / 2 pi for
    a 2D model.  An integer; the Z2 index is its parity.
    """
    half = grid // 2
    ks = kgrid(2, grid)[:, :half + 1]
    frames = occupied_states(model, ks)
    frames[:, 0] = _constrain_line(frames[:, 0], u_t)
    frames[:, half] = _constrain_line(frames[:, half], u_t)

    ux = _link_phases(frames, shifted(frames, 0))
    uy = _link_phases(frames[:, :-1], frames[:, 1:])
    loops = ux[:, :-1] * shifted(uy, 0) * np.conj(ux[:, 1:]) * np.conj(uy)
    flux = np.sum(np.angle(loops))
    boundary = np.sum(np.angle(ux[:, 0])) - np.sum(np.angle(ux[:, half]))
    pump = (flux - boundary) / (2 * np.pi)
    _logger.debug("half-zone flux %.6f boundary %.6f pump %.6f", flux, boundary, pump)
    return float(pump)


def _check_grid(grid: int):
    if grid < 4 or grid % 2:
        raise InconsistentInput(msg=f"Z2 grid must be even and at least 4, got {grid}", grid=grid)


def z2_index_2d(model: BlochModel, grid: int = 24, u_t: Optional[np.ndarray] = None) -> InvariantResult:
    if model.dim != 2:
        raise DimensionMismatch(msg=f"z2_index_2d needs a 2D model, {model.name} has dim {model.dim}")
    _check_grid(grid)
    u_t = time_reversal_operator(model, u_t)
    pump = half_zone_pump(model, u_t, grid)
    result = InvariantResult('z2_2d', pump, grid, model, modulus=2).require(1e-6)
    _logger.info("z2 of %s: %d (pump %.6f) at grid %d", model.name, result.value, pump, grid)
    return result


def plane_model(model: BlochModel, axis: int, value: float) -> BlochModel:
    """2D slice of a 3D model at k_axis = value; the remaining momenta keep
    their order."""
    others = [a for a in range(3) if a != axis]

    def evaluator(ks):
        full = np.empty(ks.shape[:-1] + (3,))
        full[..., others[0]] = ks[..., 0]
        full[..., others[1]] = ks[..., 1]
        full[..., axis] = value
        return model.evaluator(full)

    name = f"{model.name}[k{'xyz'[axis]}={value:.6g}]"
    return model.derive(name, evaluator, dim=2)


class Z2Result3D(InvariantResult):
    """Strong index as value; the weak indices (x, y, z) and the plane
    pumps go to the extra fields."""

    @property
    def strong(self) -> int:
        return self.value

    @property
    def weak(self) -> Tuple[int, int, int]:
        return tuple(self.extra['weak'])


def z2_strong_3d(model: BlochModel, grid: int = 24, u_t: Optional[np.ndarray] = None) -> Z2Result3D:
    """
    strong = z2(kz=0) + z2(kz=pi) mod 2, weak_j = z2(k_j=pi); each plane
    index is the half-zone pump of that plane.
    """
    if model.dim != 3:
        raise DimensionMismatch(msg=f"z2_strong_3d needs a 3D model, {model.name} has dim {model.dim}")
    _check_grid(grid)
    u_t = time_reversal_operator(model, u_t)
    pumps: Dict[str, float] = {}
    for axis in range(3):
        for value, tag in ((0.0, '0'), (np.pi, 'pi')):
            if axis < 2 and tag == '0':
                continue
            pumps[f"k{'xyz'[axis]}={tag}"] = half_zone_pump(plane_model(model, axis, value), u_t, grid)
    for key, pump in pumps.items():
        if abs(pump - np.rint(pump)) >= 1e-6:
            raise NotConverged(msg=f"Plane {key} pump {pump:.6f} is not an integer")
    bits = {key: int(np.rint(pump)) % 2 for key, pump in pumps.items()}
    raw = pumps['kz=0'] + pumps['kz=pi']
    weak = [bits['kx=pi'], bits['ky=pi'], bits['kz=pi']]
    result = Z2Result3D('z2_3d_strong', raw, grid, model, modulus=2, weak=weak,
                        planes={key: bits[key] for key in sorted(bits)})
    _logger.info("z2 3d of %s: strong %d weak %s", model.name, result.strong, weak)
    return result


# Independent routes


def sewing_matrix(model: BlochModel, k, u_t: Optional[np.ndarray] = None,
                  frame: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """w_mn(k) = <u_m(k)| T |u_n(-k)>, with frames from frame(k) or from
    the eigensolver.  Unitary, and antisymmetric at a TRIM."""
    if u_t is None:
        u_t = time_reversal_operator(model)
    k = np.asarray(k, dtype=float)
    # -k reduced into [0, 2 pi), so that at a TRIM both sides see the same input
    minus_k = np.mod(-k, 2 * np.pi)
    if frame is None:
        here = occupied_states(model, k)
        there = occupied_states(model, minus_k)
    else:
        here, there = frame(k), frame(minus_k)
    return dagger(here) @ apply_tr(u_t, there)


def trim_pfaffian_product(model: BlochModel, frame: Callable[[np.ndarray], np.ndarray],
                          u_t: Optional[np.ndarray] = None, steps: int = 64) -> InvariantResult:
    """
    Product over the TRIMs of sqrt(det w)/Pf(w), for a gauge frame(k) that
    is smooth over the whole zone.  The square root is continued along the
    straight path from k = 0 to each TRIM.  Returns the bit with
    (-1)**bit equal to the product.
    """
    if u_t is None:
        u_t = time_reversal_operator(model)
    signs = []
    for point in trims(model.dim):
        root = None
        for t in np.linspace(0.0, 1.0, steps + 1):
            det = np.linalg.det(sewing_matrix(model, t * point, u_t, frame))
            candidate = np.sqrt(det + 0j)
            if root is not None and abs(candidate + root) < abs(candidate - root):
                candidate = -candidate
            root = candidate
        pf = pfaffian(sewing_matrix(model, point, u_t, frame))
        delta = root / pf
        if abs(abs(delta) - 1) > 1e-6 or abs(delta.imag) > 1e-6:
            raise InconsistentInput(msg=f"sqrt(det w)/Pf(w) = {delta:.6g} at TRIM {point.tolist()}")
        signs.append(int(np.sign(delta.real)))
    product = int(np.prod(signs))
    bit = 0 if product > 0 else 1
    return InvariantResult('z2_pfaffian', bit, 0, model, signs=signs)


def check_inversion(model: BlochModel, p: np.ndarray, grid: int = 8) -> float:
    """max |P H(k) P^dagger - H(-k)| over the grid."""
    ks = kgrid(model.dim, grid)
    residual = p @ model.hamiltonians(ks) @ dagger(p) - model.hamiltonians(-ks)
    return float(np.max(np.linalg.norm(residual, ord=2, axis=(-2, -1))))


def parity_products(model: BlochModel, inversion: Optional[np.ndarray] = None,
                    u_t: Optional[np.ndarray] = None) -> Dict[Tuple[float, ...], int]:
    """delta_i = (-1)**(n_neg/2) at each TRIM, n_neg counting occupied
    states of odd parity."""
    u_t = time_reversal_operator(model, u_t)
    p = model.symmetry('INVERSION') if inversion is None else np.asarray(inversion, dtype=complex)
    if p is None:
        raise InconsistentInput(msg=f"Model {model.name} has no inversion operator")
    violation = check_inversion(model, p)
    if violation > SYMMETRY_TOL:
        raise InconsistentInput(msg=f"Inversion fails on {model.name} (violation {violation:.3g})")
    if np.max(np.abs(u_t @ np.conj(p) - p @ u_t)) > SYMMETRY_TOL:
        raise InconsistentInput(msg="Inversion does not commute with time reversal")
    points = trims(model.dim)
    values, vectors = eigh_stack(model.hamiltonians(points))
    gap_check(values, model.n_occ, points, GAP_TOL)
    occ = vectors[..., :model.n_occ]
    deltas = {}
    for point, frame in zip(points, occ):
        block = dagger(frame) @ p @ frame
        n_neg = int(np.sum(np.linalg.eigvalsh((block + dagger(block)) / 2) < 0))
        if n_neg % 2:
            raise InconsistentInput(msg=f"Odd number of negative-parity states at TRIM {point.tolist()}")
        deltas[tuple(point.tolist())] = (-1) ** (n_neg // 2)
    return deltas


def z2_parity_index(model: BlochModel, inversion: Optional[np.ndarray] = None,
                    u_t: Optional[np.ndarray] = None) -> InvariantResult:
    """Z2 from inversion eigenvalues: (-1)**nu is the product of delta_i
    over all TRIMs.  In 3D the weak indices use the TRIMs with k_j = pi."""
    deltas = parity_products(model, inversion, u_t)
    bit = 0 if np.prod(list(deltas.values())) > 0 else 1
    extra = {}
    if model.dim == 3:
        extra['weak'] = [0 if np.prod([d for k, d in deltas.items() if k[axis] > 0]) > 0 else 1
                         for axis in range(3)]
    return InvariantResult('z2_parity', bit, 0, model, **extra)
