"""
The lattice-model zoo.  A BlochModel maps crystal momenta k in [0, 2pi)^d
to Hermitian matrices H(k); a DVectorModel additionally knows the real
vector d(k) with H(k) = sum_a d_a(k) Gamma^a.

Evaluators are vectorized: they take an array of shape (..., dim) and
return an array of shape (..., n_orb, n_orb).  Pointwise samplers can be
wrapped with BlochModel.from_sampler.

Registered models (build_model):
    qahe2d            d = (sin kx, sin ky, m + cos kx + cos ky)
    ssh1d             q(k) = t1 + t2 exp(-ik) as the off-diagonal block
    doubled_qahe_trs  diag(h(k), h*(-k)) plus eps sin(kx) spin mixing
    dirac3d_chiral    d = (sin k1..sin k3, m + sum cos), chiral Gamma^5
    dirac3d_trs       same d with time reversal 1 (x) i sigma_y
    dirac4d           d = (sin k1..sin k4, m + sum cos), five gammas
"""

import logging
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple, Type, Union

from frozendict import frozendict
import numpy as np

from bandcore.dbfutil import SimpleClass
from bandcore.keyval import parse_keyvals
from .errors import (DimensionMismatch, GapClosed, InvalidOccupation, MissingParameter, UnknownModel,
                     UnknownParameter)
from .linalg import (IDENTITY2, PAULI, SIGMA_X, SIGMA_Y, SIGMA_Z, Projector,
                     d_dot_gamma, dagger, eigensystem, eigh_stack, gamma_matrices)


_logger = logging.getLogger(__name__)


GAP_TOL = 1e-8

Evaluator = Callable[[np.ndarray], np.ndarray]


def kgrid(dim: int, n: int) -> np.ndarray:
    """Uniform grid k_j = 2 pi j / n per axis, shape (n,)*dim + (dim,).
    Row-major order of the leading axes is the summation order used by
    every grid reduction in the package."""
    if dim == 0:
        return np.zeros((0,))
    axis = 2 * np.pi * np.arange(n) / n
    return np.stack(np.meshgrid(*([axis] * dim), indexing='ij'), axis=-1)


def trims(dim: int) -> np.ndarray:
    """The 2**dim time-reversal-invariant momenta, in binary order."""
    pts = [[np.pi * ((i >> (dim - 1 - a)) & 1) for a in range(dim)] for i in range(2 ** dim)]
    return np.array(pts, dtype=float).reshape(2 ** dim, dim)


class BlochModel(SimpleClass):

    name: str
    dim: int
    n_orb: int
    n_occ: int
    params: frozendict
    evaluator: Evaluator
    symmetries: frozendict

    def __init__(self, name: str, dim: int, n_orb: int, evaluator: Evaluator,
                 n_occ: Optional[int] = None, params: Optional[Mapping] = None,
                 symmetries: Optional[Mapping] = None, **kwargs):
        if n_occ is None:
            n_occ = n_orb // 2
        if not 0 < n_occ < n_orb:
            raise InvalidOccupation(msg=f"n_occ={n_occ} outside 1..{n_orb - 1}", n_occ=n_occ, n_orb=n_orb)
        super().__init__(name=name, dim=dim, n_orb=n_orb, n_occ=n_occ, evaluator=evaluator,
                         params=frozendict(params or {}),
                         symmetries=frozendict(symmetries or {}), **kwargs)

    @classmethod
    def from_sampler(cls, name: str, dim: int, n_orb: int,
                     sampler: Callable[[np.ndarray], np.ndarray], **kwargs) -> 'BlochModel':
        """Wrap a pointwise map k -> H(k) (the raw-matrix escape hatch)."""
        def evaluator(ks):
            ks = np.asarray(ks, dtype=float)
            flat = ks.reshape(-1, dim)
            out = np.array([np.asarray(sampler(k), dtype=complex) for k in flat])
            return out.reshape(ks.shape[:-1] + (n_orb, n_orb))
        return cls(name, dim, n_orb, evaluator, **kwargs)

    def _check_k(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if k.shape[-1:] != (self.dim,):
            raise DimensionMismatch(msg=f"k has {k.shape[-1:]} components, model {self.name} needs {self.dim}")
        return k

    def hamiltonian(self, k: Sequence[float]) -> np.ndarray:
        k = self._check_k(k)
        return np.asarray(self.evaluator(k), dtype=complex)

    def hamiltonians(self, ks: np.ndarray) -> np.ndarray:
        ks = self._check_k(ks)
        return np.asarray(self.evaluator(ks), dtype=complex)

    def on_grid(self, n: int) -> np.ndarray:
        return self.hamiltonians(kgrid(self.dim, n))

    def symmetry(self, kind: str) -> Optional[np.ndarray]:
        return self.symmetries.get(kind)

    def derive(self, name: str, evaluator: Evaluator, **overrides) -> 'BlochModel':
        fields = dict(dim=self.dim, n_orb=self.n_orb, n_occ=self.n_occ,
                      params=self.params, symmetries=self.symmetries)
        fields.update(overrides)
        return BlochModel(name, evaluator=evaluator, **fields)

    def with_occupation(self, n_occ: int) -> 'BlochModel':
        return self.derive(self.name, self.evaluator, n_occ=n_occ)

    def __repr__(self):
        params = " ".join(f"{k}={v}" for k, v in self.params.items())
        return f"<{type(self).__name__} {self.name} dim={self.dim} n_orb={self.n_orb} n_occ={self.n_occ} {params}>"


class DVectorModel(BlochModel):
    """
    Dirac-type model H(k) = d(k) . Gamma.  d_family(k, m) gives the d-vector
    for any mass m, which the critical-point search needs; the model's own
    mass is params['m'].
    """

    count: int
    gammas: Tuple[np.ndarray, ...]
    d_family: Callable[[np.ndarray, float], np.ndarray]

    def __init__(self, name: str, dim: int, gammas: Sequence[np.ndarray],
                 d_family: Callable[[np.ndarray, float], np.ndarray], params: Mapping, **kwargs):
        gammas = tuple(gammas)
        mass = params['m']

        def evaluator(ks):
            return d_dot_gamma(d_family(ks, mass), gammas)

        super().__init__(name, dim, gammas[0].shape[0], evaluator, params=params,
                         gammas=gammas, count=len(gammas), d_family=d_family, **kwargs)

    def d_vector(self, k: np.ndarray, m: Optional[float] = None) -> np.ndarray:
        k = self._check_k(k)
        return self.d_family(k, self.params['m'] if m is None else m)

    def d_map(self, k: np.ndarray) -> np.ndarray:
        return self.d_vector(k)

    def with_mass(self, m: float) -> 'DVectorModel':
        params = dict(self.params)
        params['m'] = float(m)
        return DVectorModel(self.name, self.dim, self.gammas, self.d_family, params=params,
                            n_occ=self.n_occ, symmetries=self.symmetries)

    def with_occupation(self, n_occ: int) -> 'DVectorModel':
        return DVectorModel(self.name, self.dim, self.gammas, self.d_family, params=self.params,
                            n_occ=n_occ, symmetries=self.symmetries)


def wilson_dirac_d(k: np.ndarray, m: float) -> np.ndarray:
    """(sin k_1, ..., sin k_d, m + sum_i cos k_i)."""
    k = np.asarray(k, dtype=float)
    mass = m + np.sum(np.cos(k), axis=-1)
    return np.concatenate([np.sin(k), mass[..., np.newaxis]], axis=-1)


# Registry


ModelBuilder = Callable[..., BlochModel]


class ModelZoo(object):
    """Closed registry of named models, with the required parameters of
    each.  Optional parameters carry defaults."""

    builders: Dict[str, ModelBuilder] = {}
    required: Dict[str, Tuple[str, ...]] = {}
    optional: Dict[str, Dict[str, float]] = {}

    @classmethod
    def register(cls, name: str, required: Tuple[str, ...], optional: Optional[Dict[str, float]] = None):
        def decorate(builder: ModelBuilder) -> ModelBuilder:
            cls.builders[name] = builder
            cls.required[name] = required
            cls.optional[name] = dict(optional or {})
            return builder
        return decorate

    @classmethod
    def names(cls):
        return sorted(cls.builders)

    @classmethod
    def build(cls, name: str, params: Mapping[str, Union[str, float]]) -> BlochModel:
        if name not in cls.builders:
            raise UnknownModel(msg=f"Unknown model '{name}'; known: {', '.join(cls.names())}", model=name)
        params = dict(params)
        n_occ = params.pop('n_occ', None)
        missing = [p for p in cls.required[name] if p not in params]
        if missing:
            raise MissingParameter(msg=f"Model {name} needs {', '.join(missing)}", missing=missing)
        known = set(cls.required[name]) | set(cls.optional[name])
        unknown = sorted(set(params) - known)
        if unknown:
            raise UnknownParameter(msg=f"Model {name} takes no parameter {', '.join(unknown)}", unknown=unknown)
        values = dict(cls.optional[name])
        values.update({key: float(val) for key, val in params.items()})
        model = cls.builders[name](**values)
        if n_occ is not None:
            model = model.with_occupation(int(n_occ))
        _logger.debug("Built %r", model)
        return model


def build_model(spec: Union[str, Mapping[str, Union[str, float]]], **params) -> BlochModel:
    """
    Build a registered model from a flat spec, either the text form
    "model=qahe2d m=1.0 n_occ=1", a mapping with a 'model' key, or a bare
    name with keyword parameters: build_model('qahe2d', m=1).
    """
    if isinstance(spec, str) and '=' in spec:
        spec = parse_keyvals(spec)
    if isinstance(spec, str):
        name, values = spec, dict(params)
    else:
        values = dict(spec)
        values.update(params)
        if 'model' not in values:
            raise UnknownModel(msg="Model spec names no model")
        name = values.pop('model')
    return ModelZoo.build(name, values)


@ModelZoo.register('qahe2d', ('m',))
def qahe2d(m: float) -> DVectorModel:
    return DVectorModel('qahe2d', 2, PAULI, wilson_dirac_d, params={'m': m},
                        symmetries={'PH': SIGMA_X, 'INVERSION': SIGMA_Z})


@ModelZoo.register('ssh1d', ('t1', 't2'))
def ssh1d(t1: float, t2: float) -> BlochModel:
    def evaluator(ks):
        k = ks[..., 0]
        a = (t1 + t2 * np.cos(k))[..., np.newaxis, np.newaxis]
        b = (t2 * np.sin(k))[..., np.newaxis, np.newaxis]
        return a * SIGMA_X + b * SIGMA_Y
    # Real H, so time reversal is plain conjugation.
    return BlochModel('ssh1d', 1, 2, evaluator, params={'t1': t1, 't2': t2},
                      symmetries={'CHIRAL': SIGMA_Z, 'TR': IDENTITY2, 'PH': SIGMA_Z})


def time_reversal_double(model: BlochModel, name: Optional[str] = None) -> BlochModel:
    """
    diag(h(k), h*(-k)) in a spin-block basis.  Time reversal with
    U_T = i sigma_y (x) 1 then holds with U_T U_T* = -1.  Inversion and
    chiral operators of the input carry over as diag(P, P*).
    """
    n = model.n_orb

    def evaluator(ks):
        upper = model.evaluator(ks)
        lower = np.conj(model.evaluator(-ks))
        out = np.zeros(upper.shape[:-2] + (2 * n, 2 * n), dtype=complex)
        out[..., :n, :n] = upper
        out[..., n:, n:] = lower
        return out

    symmetries = {'TR': np.kron(1j * SIGMA_Y, np.eye(n))}
    for kind in ('INVERSION', 'CHIRAL'):
        if kind in model.symmetries:
            op = model.symmetries[kind]
            symmetries[kind] = np.block([[op, np.zeros_like(op)], [np.zeros_like(op), np.conj(op)]])
    return BlochModel(name or f"doubled_{model.name}", model.dim, 2 * n, evaluator,
                      n_occ=2 * model.n_occ, params=model.params, symmetries=symmetries)


@ModelZoo.register('doubled_qahe_trs', ('m',), optional={'eps': 0.0})
def doubled_qahe_trs(m: float, eps: float = 0.0) -> BlochModel:
    base = time_reversal_double(qahe2d(m), name='doubled_qahe_trs')

    def evaluator(ks):
        out = base.evaluator(ks)
        # Spin flip eps sin(kx) sigma_x keeps U_T and inversion 1 (x) sigma_z.
        flip = (eps * np.sin(ks[..., 0]))[..., np.newaxis, np.newaxis] * SIGMA_X
        out[..., :2, 2:] += flip
        out[..., 2:, :2] += flip
        return out

    return base.derive('doubled_qahe_trs', evaluator, params={'m': m, 'eps': eps})


@ModelZoo.register('dirac3d_chiral', ('m',))
def dirac3d_chiral(m: float) -> DVectorModel:
    g = gamma_matrices(5)
    return DVectorModel('dirac3d_chiral', 3, g[:4], wilson_dirac_d, params={'m': m},
                        symmetries={'CHIRAL': g[4]})


@ModelZoo.register('dirac3d_trs', ('m',))
def dirac3d_trs(m: float) -> DVectorModel:
    g = gamma_matrices(5)
    # sigma_x (x) sigma_a are odd under 1 (x) i sigma_y with conjugation,
    # the mass matrix sigma_z (x) 1 is even.
    return DVectorModel('dirac3d_trs', 3, (g[0], g[1], g[2], g[4]), wilson_dirac_d, params={'m': m},
                        symmetries={'TR': np.kron(IDENTITY2, 1j * SIGMA_Y), 'INVERSION': g[4]})


@ModelZoo.register('dirac4d', ('m',))
def dirac4d(m: float) -> DVectorModel:
    return DVectorModel('dirac4d', 4, gamma_matrices(5), wilson_dirac_d, params={'m': m})


def layered_stack(model: BlochModel, name: Optional[str] = None) -> BlochModel:
    """Stack a 2D model along z without interlayer hopping."""
    def evaluator(ks):
        return model.evaluator(ks[..., :model.dim])
    return model.derive(name or f"stacked_{model.name}", evaluator, dim=model.dim + 1)


def constant_model(h: np.ndarray, dim: int, name: str = 'atomic', **kwargs) -> BlochModel:
    """k-independent model, e.g. an atomic limit."""
    h = np.asarray(h, dtype=complex)

    def evaluator(ks):
        return np.broadcast_to(h, np.shape(ks)[:-1] + h.shape).copy()
    return BlochModel(name, dim, h.shape[0], evaluator, **kwargs)


# Spectral helpers


def gap_check(values: np.ndarray, n_occ: int, ks: Optional[np.ndarray] = None, tol: float = GAP_TOL) -> float:
    """Smallest gap at the Fermi division over a stack of spectra; raises
    GapClosed below tol."""
    gaps = values[..., n_occ] - values[..., n_occ - 1]
    idx = np.unravel_index(np.argmin(gaps), gaps.shape) if gaps.ndim else ()
    gap = float(gaps[idx])
    if gap <= tol:
        where = ks[idx] if ks is not None else None
        raise GapClosed(msg=f"Gap {gap:.3g} at k={None if where is None else np.round(where, 6).tolist()}",
                        gap=gap, k=where)
    return gap


def occupied_states(model: BlochModel, ks: np.ndarray, tol: float = GAP_TOL) -> np.ndarray:
    """Occupied eigenvectors, shape (..., n_orb, n_occ), after a gap check."""
    values, vectors = eigh_stack(model.hamiltonians(ks))
    gap_check(values, model.n_occ, ks, tol)
    return vectors[..., :model.n_occ]


def occupied_projector(model: BlochModel, k: Sequence[float]) -> Projector:
    es = eigensystem(model.hamiltonian(k))
    gap = es.gap_above(model.n_occ)
    if gap <= GAP_TOL:
        raise GapClosed(msg=f"Gap {gap:.3g} at k={list(k)}", gap=gap, k=np.asarray(k))
    return Projector.from_columns(es.vectors[:, :model.n_occ])


def two_band_projector(d: np.ndarray) -> np.ndarray:
    """Lower-band projector (1 - d_hat . sigma) / 2."""
    d = np.asarray(d, dtype=float)
    dhat = d / np.linalg.norm(d)
    return (IDENTITY2 - d_dot_gamma(dhat, PAULI)) / 2


def minimum_gap(model: BlochModel, grid: int) -> float:
    if grid < 2:
        raise ValueError("grid must be at least 2")
    values = np.linalg.eigvalsh(model.on_grid(grid))
    gaps = values[..., model.n_occ] - values[..., model.n_occ - 1]
    return max(0.0, float(np.min(gaps)))


def spectrally_flatten(model: BlochModel) -> BlochModel:
    """Same eigenvectors, eigenvalues -1 (occupied) and +1 (empty)."""
    n_occ = model.n_occ

    def evaluator(ks):
        values, vectors = eigh_stack(model.evaluator(ks))
        gap_check(values, n_occ, ks)
        signs = np.where(np.arange(model.n_orb) < n_occ, -1.0, 1.0)
        return (vectors * signs) @ dagger(vectors)

    return model.derive(f"flat_{model.name}", evaluator)
