"""
Single-particle Green's functions G(i omega, k) on the imaginary
frequency axis, the frequency-momentum winding N3[G] and the
zero-frequency effective Hamiltonian h_eff(k) = -G^-1(0, k).

Only static self-energies are supported, so G^-1(i omega, k) =
i omega - H(k) - Sigma and d/d omega G^-1 = i.
"""

import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np

from bandcore.dbfutil import SimpleClass
from .errors import (GapClosed, InconsistentInput, NonUniformFilling, SingularGreen,
                     SingularZeroFrequency)
from .invariants import InvariantResult, chern_number_2d
from .linalg import check_hermitian
from .models import GAP_TOL, BlochModel, kgrid, minimum_gap


_logger = logging.getLogger(__name__)


DEFAULT_KGRID = 24
DEFAULT_WQUAD = 200
SINGULAR_TOL = 1e-8
DEFORMATION_TOL = 1e-6
N3_RESIDUAL = 0.02

Sampler = Callable[[np.ndarray, np.ndarray], np.ndarray]


class GreenFunction(SimpleClass):
    """
    sampler(omega, ks) gives G(i omega, k) for real omega broadcast
    against ks[..., :dim]; inverse_sampler, when known in closed form,
    gives G^-1 without a matrix inversion.
    """

    name: str
    dim: int
    n_orb: int
    sampler: Sampler
    inverse_sampler: Optional[Sampler]
    self_energy_tag: str
    model: Optional[BlochModel]

    def __init__(self, name: str, dim: int, n_orb: int, sampler: Sampler,
                 inverse_sampler: Optional[Sampler] = None, self_energy_tag: str = 'none',
                 model: Optional[BlochModel] = None):
        super().__init__(name=name, dim=dim, n_orb=n_orb, sampler=sampler,
                         inverse_sampler=inverse_sampler, self_energy_tag=self_energy_tag, model=model)

    def __call__(self, omega, ks) -> np.ndarray:
        return self.sampler(np.asarray(omega, dtype=float), np.asarray(ks, dtype=float))

    def inverse(self, omega, ks) -> np.ndarray:
        omega, ks = np.asarray(omega, dtype=float), np.asarray(ks, dtype=float)
        if self.inverse_sampler is not None:
            return self.inverse_sampler(omega, ks)
        return np.linalg.inv(self.sampler(omega, ks))

    def __repr__(self):
        return f"<GreenFunction {self.name} dim={self.dim} n_orb={self.n_orb} sigma={self.self_energy_tag}>"


def _frequency_term(omega: np.ndarray, n: int) -> np.ndarray:
    return 1j * omega[..., np.newaxis, np.newaxis] * np.eye(n)


def _resolvent(h_of: Callable[[np.ndarray], np.ndarray], n: int) -> Sampler:
    def inverse(omega, ks):
        omega = np.broadcast_to(omega, ks.shape[:-1])
        return _frequency_term(omega, n) - h_of(ks)
    return inverse


def g0_from_model(model: BlochModel, gap_grid: int = 16) -> GreenFunction:
    """G0(i omega, k) = (i omega - H(k))^-1."""
    gap = minimum_gap(model, gap_grid)
    if gap <= GAP_TOL:
        raise GapClosed(msg=f"Model {model.name} is gapless (minimum gap {gap:.3g})", gap=gap)
    inverse = _resolvent(model.hamiltonians, model.n_orb)

    def sampler(omega, ks):
        return np.linalg.inv(inverse(omega, ks))

    return GreenFunction(f"G0[{model.name}]", model.dim, model.n_orb, sampler, inverse, model=model)


def with_self_energy(green: GreenFunction, sigma: Union[float, np.ndarray], tag: Optional[str] = None) -> GreenFunction:
    """G^-1 -> G^-1 - Sigma for a static Hermitian Sigma (a scalar means
    Sigma = sigma * identity)."""
    n = green.n_orb
    sigma_matrix = np.asarray(sigma, dtype=complex)
    if sigma_matrix.ndim == 0:
        tag = tag or f"static scalar {float(np.real(sigma_matrix)):.6g}"
        sigma_matrix = sigma_matrix * np.eye(n)
    if sigma_matrix.shape != (n, n):
        raise InconsistentInput(msg=f"Self-energy shape {sigma_matrix.shape} does not fit {n} orbitals")
    check_hermitian(sigma_matrix)
    tag = tag or "static matrix"
    base = green

    def inverse(omega, ks):
        return base.inverse(omega, ks) - sigma_matrix

    def sampler(omega, ks):
        return np.linalg.inv(inverse(omega, ks))

    return GreenFunction(f"{green.name}+sigma", green.dim, n, sampler, inverse,
                         self_energy_tag=tag, model=green.model)


def frequency_nodes(wquad: int):
    """omega = tan(theta) at Gauss-Legendre nodes in theta over (-pi/2, pi/2),
    with weights including d omega / d theta = sec^2 theta."""
    x, w = np.polynomial.legendre.leggauss(wquad)
    theta = x * np.pi / 2
    return np.tan(theta), w * (np.pi / 2) / np.cos(theta) ** 2


def _check_invertible(ginv: np.ndarray, error=SingularGreen, where="sampling set"):
    smallest = float(np.min(np.linalg.svd(ginv, compute_uv=False)))
    if smallest <= SINGULAR_TOL:
        raise error(msg=f"G^-1 has singular value {smallest:.3g} on the {where}", min_singular=smallest)
    return smallest



def n3_invariant(green: GreenFunction, kgrid_size: int = DEFAULT_KGRID, wquad: int = DEFAULT_WQUAD) -> InvariantResult:
    """
    N3[G] = (1/24 pi^2) int d omega d^2k eps^{mu nu rho}
            tr(G d_mu G^-1 G d_nu G^-1 G d_rho G^-1),
    coordinates ordered (omega, kx, ky).  d_k G^-1 by central differences
    with step 2 pi / (8 kgrid), evaluated once at omega = 0.
    """
    if green.dim != 2:
        raise InconsistentInput(msg=f"n3_invariant needs a 2D Green's function, got dim {green.dim}")
    n = green.n_orb
    ks = kgrid(2, kgrid_size)
    delta = 2 * np.pi / (8 * kgrid_size)
    zero = np.zeros(ks.shape[:-1])
    derivs = []
    for axis in range(2):
        step = np.zeros(2)
        step[axis] = delta
        derivs.append((green.inverse(zero, ks + step) - green.inverse(zero, ks - step)) / (2 * delta))

    omegas, weights = frequency_nodes(wquad)
    total = 0.0
    smallest = np.inf
    for omega, weight in zip(omegas, weights):
        ginv = green.inverse(np.full(ks.shape[:-1], omega), ks)
        smallest = min(smallest, _check_invertible(ginv))
        g = np.linalg.inv(ginv)
        a0 = 1j * g
        a1 = g @ derivs[0]
        a2 = g @ derivs[1]
        density = np.trace(a0 @ a1 @ a2, axis1=-2, axis2=-1) - np.trace(a0 @ a2 @ a1, axis1=-2, axis2=-1)
        total += weight * np.sum(3 * density)
    h = 2 * np.pi / kgrid_size
    raw = np.real(total) * h ** 2 / (24 * np.pi ** 2)
    _logger.info("N3 of %s: %.6f (kgrid %d, %d frequency nodes)", green.name, raw, kgrid_size, wquad)
    return InvariantResult('n3', raw, kgrid_size, green.model, wquad=wquad,
                           self_energy_tag=green.self_energy_tag).require(N3_RESIDUAL)


def heff_model(green: GreenFunction, grid: int = DEFAULT_KGRID) -> BlochModel:
    """h_eff(k) = -G^-1(0, k) with n_occ the number of its negative
    eigenvalues, which must be the same at every k of the grid."""
    ks = kgrid(green.dim, grid)
    zero = np.zeros(ks.shape[:-1])
    ginv = green.inverse(zero, ks)
    _check_invertible(ginv, SingularZeroFrequency, "zero-frequency grid")
    values = np.linalg.eigvalsh(-ginv)
    filling = np.sum(values < 0, axis=-1)
    if np.min(filling) != np.max(filling):
        raise NonUniformFilling(msg=f"h_eff has between {np.min(filling)} and {np.max(filling)} negative eigenvalues")
    n_occ = int(filling.flat[0])

    def evaluator(k):
        k = np.asarray(k, dtype=float)
        return -green.inverse(np.zeros(k.shape[:-1]), k)

    params = green.model.params if green.model is not None else {}
    return BlochModel(f"heff[{green.name}]", green.dim, green.n_orb, evaluator, n_occ=n_occ, params=params)


def heff_invariant(green: GreenFunction, grid: int = DEFAULT_KGRID) -> InvariantResult:
    model = heff_model(green, grid)
    chern = chern_number_2d(model, grid)
    return InvariantResult('heff', chern.raw, grid, green.model, self_energy_tag=green.self_energy_tag,
                           n_occ=model.n_occ)


def deformed(green: GreenFunction, lam: float) -> GreenFunction:
    """G_lambda(i omega, k) = (1 - lambda) G + lambda [i omega + G^-1(0, k)]^-1."""
    lam = float(lam)
    n = green.n_orb

    def sampler(omega, ks):
        omega = np.broadcast_to(omega, ks.shape[:-1])
        endpoint = np.linalg.inv(_frequency_term(omega, n) + green.inverse(np.zeros_like(omega), ks))
        return (1 - lam) * green(omega, ks) + lam * endpoint

    return GreenFunction(f"{green.name}@{lam:g}", green.dim, n, sampler,
                         self_energy_tag=green.self_energy_tag, model=green.model)


class DeformationCheck(SimpleClass):

    smooth: bool
    min_singular: float
    lambdas: Sequence[float]

    def to_dict(self):
        return dict(smooth=self.smooth, min_singular=self.min_singular, lambdas=list(self.lambdas))


def deformation_gap_check(green: GreenFunction, lambda_samples: Sequence[float] = (0, 0.25, 0.5, 0.75, 1),
                          kgrid_size: int = DEFAULT_KGRID, wquad: int = DEFAULT_WQUAD) -> DeformationCheck:
    """Smallest singular value of G_lambda^-1 over the lambdas and the
    (omega, k) sampling set; smooth when it stays above 1e-6."""
    ks = kgrid(green.dim, kgrid_size)
    omegas, _ = frequency_nodes(wquad)
    smallest = np.inf
    for lam in lambda_samples:
        if not 0 <= lam <= 1:
            raise InconsistentInput(msg=f"lambda={lam} outside [0, 1]")
        g_lam = deformed(green, lam)
        for omega in omegas:
            g = g_lam(np.full(ks.shape[:-1], omega), ks)
            singular = np.linalg.svd(g, compute_uv=False)
            if np.min(singular[..., -1]) <= 0:
                smallest = 0.0
                break
            smallest = min(smallest, float(np.min(1 / singular[..., 0])))
    smooth = bool(smallest > DEFORMATION_TOL)
    _logger.info("deformation of %s: smooth=%s min singular %.3g", green.name, smooth, smallest)
    return DeformationCheck(smooth=smooth, min_singular=float(smallest), lambdas=list(lambda_samples))
