"""
Band invariants: first and second Chern numbers, winding numbers of the
chiral block in one and three dimensions, and the degree of the Gauss
map of a d-vector model.

Sign conventions are fixed once: chern_number_2d(qahe2d(m=1)) = +1, and
gauss_degree, second_chern_4d and winding_number_3d are normalized to
agree with it (gauss_degree = chern_number_2d for two-band models,
second_chern_4d = gauss_degree for dirac4d, winding_number_3d =
gauss_degree for dirac3d_chiral).
"""

import itertools
import logging
from typing import Dict, Optional

import numpy as np
from scipy import special

from bandcore.dbfutil import SimpleClass
from .errors import (DimensionMismatch, GapClosed, GridTooCoarse, InconsistentInput, NoChiralSymmetry,
                     NotConverged, VanishingField)
from .linalg import dagger, eigh_stack
from .models import BlochModel, DVectorModel, gap_check, kgrid, occupied_states
from .symmetry import verified_operator
from .wilson import plaquette_field, shifted


_logger = logging.getLogger(__name__)


CHERN_GAP = 1e-6
ACCEPT_RESIDUAL = 0.05
GAUSS_RESIDUAL = 0.02


class InvariantResult(SimpleClass):
    """
    Raw value, its rounding (a bit for Z2 indices) and the discretization
    used.  extra holds fields particular to one computation, such as the
    self-energy tag of a Green's-function result.
    """

    name: str
    raw: float
    value: int
    residual: float
    grid: int
    model: Optional[str]
    params: Dict
    extra: Dict

    def __init__(self, name, raw, grid, model: Optional[BlochModel] = None, value=None,
                 modulus: Optional[int] = None, **extra):
        raw = float(raw)
        nearest = int(np.rint(raw))
        residual = abs(raw - nearest)
        if value is None:
            value = nearest % modulus if modulus else nearest
        super().__init__(name=name, raw=raw, value=int(value), residual=residual, grid=grid,
                         model=model.name if model is not None else None,
                         params=dict(model.params) if model is not None else {},
                         extra=extra)

    def require(self, tol: float) -> 'InvariantResult':
        if self.residual >= tol:
            raise NotConverged(msg=f"{self.name} raw value {self.raw:.6f} is {self.residual:.3g} from an integer "
                                   f"at grid {self.grid}; refine the grid", result=self)
        return self

    def to_dict(self) -> Dict:
        d = dict(name=self.name, raw=self.raw, value=self.value, residual=self.residual,
                 grid=self.grid, model=self.model, params=dict(self.params))
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict) -> 'InvariantResult':
        """Inverse of to_dict, e.g. on a record read back from JSON.  The
        model is restored by name only."""
        fields = dict(d)
        missing = [key for key in ('name', 'raw', 'value', 'grid') if key not in fields]
        if missing:
            raise InconsistentInput(msg=f"Result record lacks {', '.join(missing)}")
        result = cls.__new__(cls)
        raw = float(fields.pop('raw'))
        value = int(fields.pop('value'))
        residual = float(fields.pop('residual', abs(raw - np.rint(raw))))
        SimpleClass.__init__(result, name=fields.pop('name'), raw=raw, value=value, residual=residual,
                             grid=fields.pop('grid'), model=fields.pop('model', None),
                             params=dict(fields.pop('params', {})), extra=fields)
        return result

    def __repr__(self):
        return f"<InvariantResult {self.name}={self.value} raw={self.raw:.12g} grid={self.grid}>"


# First Chern number


def chern_from_frames(frames: np.ndarray) -> float:
    """Sum of plaquette field strengths over 2 pi.  Exactly an integer up
    to round-off for any frames, since every plaquette angle lies in
    (-pi, pi]."""
    field = plaquette_field(frames)
    if np.max(np.abs(field)) > np.pi * (1 - 1e-9):
        raise GridTooCoarse(msg="Plaquette field strength reaches pi")
    return float(np.sum(field) / (2 * np.pi))


def chern_number_2d(model: BlochModel, grid: int = 24) -> InvariantResult:
    if model.dim != 2:
        raise DimensionMismatch(msg=f"chern_number_2d needs a 2D model, {model.name} has dim {model.dim}")
    ks = kgrid(2, grid)
    frames = occupied_states(model, ks, tol=CHERN_GAP)
    raw = chern_from_frames(frames)
    _logger.info("chern1 of %s: %.12f at grid %d", model.name, raw, grid)
    return InvariantResult('chern1', raw, grid, model).require(1e-9)


def hall_conductance(model: BlochModel, grid: int = 24) -> float:
    """sigma_xy in units of e^2/h."""
    return float(chern_number_2d(model, grid).value)


# Second Chern number


def _permutation_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def projector_derivatives(model: BlochModel, grid: int, tol: float = CHERN_GAP):
    """
    d_mu P in the eigenbasis of H(k) at every grid point, one array per
    axis, together with the diagonal occupation mask.  d_mu H comes from
    the spectral derivative of H on the grid, and
        (d_mu P)_ij = -(V^dagger d_mu H V)_ij / |E_i - E_j|
    between an occupied and an unoccupied state, zero otherwise.
    """
    ks = kgrid(model.dim, grid)
    hs = model.hamiltonians(ks)
    values, vectors = eigh_stack(hs)
    gap_check(values, model.n_occ, ks, tol)
    occupied = np.arange(model.n_orb) < model.n_occ
    mixed = occupied[:, np.newaxis] != occupied[np.newaxis, :]
    spread = np.abs(values[..., :, np.newaxis] - values[..., np.newaxis, :])
    weight = np.where(mixed, -1.0 / np.where(mixed, spread, 1.0), 0.0)
    derivs = []
    for axis in range(model.dim):
        dh = dagger(vectors) @ spectral_derivative(hs, axis) @ vectors
        derivs.append(weight * dh)
    return derivs, occupied.astype(float)


def second_chern_4d(model: BlochModel, grid: int = 12) -> InvariantResult:
    """
    Ch2 = (1/2)(i/2pi)^2 int tr(P dP^dP^dP^dP)
        = -(1/8 pi^2) int eps^{abcd} tr(P d_a P d_b P d_c P d_d P) d^4k
    by the trapezoidal rule, with d_a P built from exact derivatives of
    H(k), so convergence in the grid is exponential for smooth models.
    """
    if model.dim != 4:
        raise DimensionMismatch(msg=f"second_chern_4d needs a 4D model, {model.name} has dim {model.dim}")
    derivs, occupied = projector_derivatives(model, grid)
    pairs = {(a, b): derivs[a] @ derivs[b] for a in range(4) for b in range(4) if a != b}
    total = 0.0
    for perm in itertools.permutations(range(4)):
        product = pairs[perm[0], perm[1]] @ pairs[perm[2], perm[3]]
        # P is diagonal in the eigenbasis, so tr(P X) sums the occupied diagonal.
        diag = np.diagonal(product, axis1=-2, axis2=-1)
        total += _permutation_sign(perm) * np.sum(diag * occupied)
    h = 2 * np.pi / grid
    raw = -np.real(total) * h ** 4 / (8 * np.pi ** 2)
    _logger.info("chern2 of %s: %.6f at grid %d", model.name, raw, grid)
    return InvariantResult('chern2', raw, grid, model).require(ACCEPT_RESIDUAL)


# Winding numbers of the chiral block


def chiral_basis(model: BlochModel, chiral: Optional[np.ndarray] = None, grid: int = 16):
    """
    Eigenbases (V_plus, V_minus) of the verified chiral operator.  S is
    rescaled so that S^2 = 1 first, so i sigma_z works as well as sigma_z.
    """
    check = verified_operator(model, 'CHIRAL', chiral, grid)
    if check is None:
        raise NoChiralSymmetry(msg=f"Model {model.name} has no chiral operator")
    if not check.holds:
        raise NoChiralSymmetry(msg=f"Chiral operator fails on {model.name} (violation {check.max_violation:.3g})")
    s = check.candidate.unitary_part
    square = (s @ s)[0, 0]
    s = s / np.sqrt(square)
    values, vectors = np.linalg.eigh((s + dagger(s)) / 2)
    plus, minus = vectors[:, values > 0], vectors[:, values < 0]
    if plus.shape[1] != minus.shape[1]:
        raise NoChiralSymmetry(msg="Chiral operator has unequal +1/-1 eigenspaces")
    return plus, minus


def chiral_block(model: BlochModel, ks: np.ndarray, plus: np.ndarray, minus: np.ndarray) -> np.ndarray:
    """q(k) = V_plus^dagger H(k) V_minus."""
    return dagger(plus) @ model.hamiltonians(ks) @ minus


def winding_number_1d(model: BlochModel, grid: int = 64, chiral: Optional[np.ndarray] = None) -> InvariantResult:
    """Winding of det q(k) around the origin, summed from principal-branch
    phase increments around the closed grid loop."""
    if model.dim != 1:
        raise DimensionMismatch(msg=f"winding_number_1d needs a 1D model, {model.name} has dim {model.dim}")
    plus, minus = chiral_basis(model, chiral)
    ks = kgrid(1, grid)
    det = np.linalg.det(chiral_block(model, ks, plus, minus))
    smallest = np.argmin(np.abs(det))
    if abs(det[smallest]) < 1e-10:
        raise GapClosed(msg=f"det q vanishes at k={ks[smallest].tolist()}", k=ks[smallest])
    steps = np.angle(np.roll(det, -1) / det)
    if np.max(np.abs(steps)) > 0.75 * np.pi:
        raise GridTooCoarse(msg="Phase of det q jumps too far between grid points")
    raw = np.sum(steps) / (2 * np.pi)
    return InvariantResult('winding1', raw, grid, model).require(1e-6)


def spectral_derivative(a: np.ndarray, axis: int) -> np.ndarray:
    """d/dk along a periodic grid axis of length n spanning 2 pi, exact for
    trigonometric polynomials of degree below n/2."""
    n = a.shape[axis]
    freq = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        freq[n // 2] = 0
    shape = [1] * a.ndim
    shape[axis] = n
    return np.fft.ifft(1j * freq.reshape(shape) * np.fft.fft(a, axis=axis), axis=axis)


def winding_3d_density(q: np.ndarray) -> np.ndarray:
    """eps^{ijk} tr(A_i A_j A_k) with A_i = q^-1 d_i q, on a 3D grid."""
    a = [np.linalg.solve(q, spectral_derivative(q, axis)) for axis in range(3)]
    def tr(x, y, z):
        return np.trace(x @ y @ z, axis1=-2, axis2=-1)
    return 3 * (tr(a[0], a[1], a[2]) - tr(a[0], a[2], a[1]))


def winding_number_3d(model: BlochModel, grid: int = 20, chiral: Optional[np.ndarray] = None) -> InvariantResult:
    """W3 = (1/24 pi^2) int eps^{ijk} tr(q^-1 d_i q q^-1 d_j q q^-1 d_k q)
    by the trapezoidal rule on the periodic grid."""
    if model.dim != 3:
        raise DimensionMismatch(msg=f"winding_number_3d needs a 3D model, {model.name} has dim {model.dim}")
    plus, minus = chiral_basis(model, chiral)
    ks = kgrid(3, grid)
    q = chiral_block(model, ks, plus, minus)
    smallest = np.min(np.linalg.svd(q, compute_uv=False))
    if smallest < 1e-8:
        raise GapClosed(msg=f"q(k) singular (smallest singular value {smallest:.3g})", gap=2 * smallest)
    h = 2 * np.pi / grid
    raw = np.real(np.sum(winding_3d_density(q))) * h ** 3 / (24 * np.pi ** 2)
    _logger.info("winding3 of %s: %.6f at grid %d", model.name, raw, grid)
    return InvariantResult('winding3', raw, grid, model).require(ACCEPT_RESIDUAL)


# Gauss map degree


def sphere_area(d: int) -> float:
    """Area of the unit sphere S^d."""
    return float(2 * np.pi ** ((d + 1) / 2) / special.gamma((d + 1) / 2))


def _triangle_solid_angle(a, b, c):
    """Signed solid angle of the spherical triangle (a, b, c), positive
    when the triangle is counterclockwise seen from outside."""
    num = np.einsum('...i,...i->...', a, np.cross(b, c))
    den = 1 + np.einsum('...i,...i->...', a, b) + np.einsum('...i,...i->...', b, c) + \
        np.einsum('...i,...i->...', c, a)
    return 2 * np.arctan2(num, den)


def _simplex_degree(dhat: np.ndarray) -> float:
    """Degree of d_hat: T^d -> S^d for d = 1, 2 from exact image simplex
    volumes over the Kuhn triangulation of each grid cell."""
    dim = dhat.ndim - 1
    if dim == 1:
        z = dhat[..., 0] + 1j * dhat[..., 1]
        return float(np.sum(np.angle(np.roll(z, -1) / z)) / (2 * np.pi))
    n00 = dhat
    n10 = shifted(dhat, 0)
    n01 = shifted(dhat, 1)
    n11 = shifted(n10, 1)
    # (x then y) is positively oriented, (y then x) negatively, hence the
    # vertex order of the second triangle.
    area = _triangle_solid_angle(n00, n10, n11) + _triangle_solid_angle(n00, n11, n01)
    return float(np.sum(area) / (4 * np.pi))


def _quadrature_degree(d: np.ndarray) -> float:
    """Degree from the pulled-back volume form
    det[d, d_1 d, ..., d_n d] / |d|^(n+1), spectral derivatives and the
    trapezoidal rule."""
    dim = d.ndim - 1
    n = d.shape[0]
    columns = [d] + [np.real(spectral_derivative(d, axis)) for axis in range(dim)]
    jac = np.stack(columns, axis=-1)
    density = np.linalg.det(jac) / np.linalg.norm(d, axis=-1) ** (dim + 1)
    return float(np.sum(density) * (2 * np.pi / n) ** dim / sphere_area(dim))


def gauss_degree(model: DVectorModel, grid: int = 48, method: str = 'auto') -> InvariantResult:
    """
    Brouwer degree of d_hat: T^d -> S^d, with the orientation that makes it
    equal to chern_number_2d on two-band models.  method is 'simplex'
    (exact image simplices, d <= 2), 'quadrature' (any d) or 'auto'.
    """
    if not isinstance(model, DVectorModel):
        raise DimensionMismatch(msg=f"Model {model.name} has no d-vector")
    if model.count != model.dim + 1:
        raise DimensionMismatch(msg=f"d-vector has {model.count} components, need dim+1 = {model.dim + 1}")
    d = np.real(model.d_map(kgrid(model.dim, grid)))
    norm = np.linalg.norm(d, axis=-1)
    if np.min(norm) <= 1e-8:
        raise VanishingField(msg=f"|d| = {np.min(norm):.3g} on the grid")
    if method == 'auto':
        method = 'simplex' if model.dim <= 2 else 'quadrature'
    if method == 'simplex':
        if model.dim > 2:
            raise DimensionMismatch(msg="Simplex volumes are exact only up to d = 2")
        degree = _simplex_degree(d / norm[..., np.newaxis])
    elif method == 'quadrature':
        degree = _quadrature_degree(d)
    else:
        raise ValueError(f"Unknown method '{method}'")
    # Standard orientation of S^d is reversed to match the Chern convention.
    raw = -degree
    _logger.info("gauss degree of %s: %.6f (%s) at grid %d", model.name, raw, method, grid)
    return InvariantResult('gauss_degree', raw, grid, model, method=method).require(GAUSS_RESIDUAL)
