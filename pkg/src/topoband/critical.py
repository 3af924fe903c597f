"""
Zeros of the extended d-vector map d(k, m) of a Dirac-type model family,
and the phase diagram they imply.

The gauss_degree of the family can change only at the masses m_c where
d(k, m_c) vanishes for some k.  Each zero carries the sign of the
Jacobian of d with respect to (k, m); the jump of the degree as m
increases through m_c is the sum of -(-1)**dim times those signs.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from ordered_set import OrderedSet

from bandcore.dbfutil import SimpleClass
from .errors import NotConverged, SampleOnCriticalPoint
from .invariants import chern_number_2d, gauss_degree
from .models import DVectorModel, kgrid


_logger = logging.getLogger(__name__)


SEEDS_PER_AXIS = 32
NEWTON_STEPS = 50
NEWTON_STEP_TOL = 1e-12
ZERO_TOL = 1e-10
MERGE_TOL = 1e-6
DEGENERATE_DET = 1e-8
FD_STEP = 1e-7
CRITICAL_GAP = 1e-3
WINDOW_GRID = 16


class CriticalPoint(SimpleClass):
    """
    A zero of d(k, m).  location is (k_1, ..., k_d, m).  jacobian_sign is
    sgn det d(d)/d(k, m), 0 when degenerate.  degree is the Brouwer sign
    of the zero as seen from the phase it bounds on the side of smaller
    |m|; at m = 0 there is no such side and the point is a bifurcation,
    reported with degree equal to its Jacobian sign.
    """

    location: Tuple[float, ...]
    jacobian_det: float
    jacobian_sign: int
    degree: int
    jump: int
    residual: float
    degenerate: bool
    bifurcation: bool

    @property
    def k(self) -> Tuple[float, ...]:
        return self.location[:-1]

    @property
    def m(self) -> float:
        return self.location[-1]

    def to_dict(self):
        return dict(location=list(self.location), degree=self.degree, residual=self.residual,
                    jacobian_sign=self.jacobian_sign, jump=self.jump,
                    degenerate=self.degenerate, bifurcation=self.bifurcation)

    def __repr__(self):
        loc = ", ".join(f"{x:.6g}" for x in self.location)
        return f"<CriticalPoint ({loc}) degree={self.degree} jump={self.jump}>"


def _extended_map(family: DVectorModel) -> Callable[[np.ndarray], np.ndarray]:
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.real(family.d_family(x[..., :-1], x[..., -1]))
    return f


def jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian, columns indexed by the coordinates of x."""
    n = len(x)
    steps = h * np.eye(n)
    return np.stack([(f(x + steps[i]) - f(x - steps[i])) / (2 * h) for i in range(n)], axis=-1)


def newton(f, x0: np.ndarray) -> Optional[np.ndarray]:
    x = np.array(x0, dtype=float)
    for _ in range(NEWTON_STEPS):
        fx = f(x)
        if not np.any(fx):
            break
        try:
            step = np.linalg.solve(jacobian(f, x), -fx)
        except np.linalg.LinAlgError:
            return None
        x = x + step
        if np.linalg.norm(step) < NEWTON_STEP_TOL:
            break
    if np.linalg.norm(f(x)) >= ZERO_TOL:
        return None
    return x


def seed_points(family: DVectorModel, m_range: Tuple[float, float], per_axis: int) -> np.ndarray:
    """Local minima of |d| over a uniform (k, m) grid; k periodic, m not."""
    dim = family.dim
    k_axis = 2 * np.pi * np.arange(per_axis) / per_axis
    m_axis = np.linspace(m_range[0], m_range[1], per_axis)
    mesh = np.stack(np.meshgrid(*([k_axis] * dim), m_axis, indexing='ij'), axis=-1)
    size = np.linalg.norm(_extended_map(family)(mesh), axis=-1)
    keep = np.ones(size.shape, dtype=bool)
    for axis in range(dim):
        for step in (1, -1):
            keep &= size <= np.roll(size, step, axis=axis)
    padded = np.pad(size, [(0, 0)] * dim + [(1, 1)], constant_values=np.inf)
    keep &= size <= padded[..., 2:]
    keep &= size <= padded[..., :-2]
    return mesh[keep]


def _wrap(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x[:-1] = np.mod(x[:-1], 2 * np.pi)
    x[:-1][x[:-1] > 2 * np.pi - MERGE_TOL] -= 2 * np.pi
    return x


def _same_point(a: np.ndarray, b: np.ndarray) -> bool:
    dk = np.angle(np.exp(1j * (a[:-1] - b[:-1])))
    return bool(np.all(np.abs(dk) < MERGE_TOL) and abs(a[-1] - b[-1]) < MERGE_TOL)


def critical_points(family: DVectorModel, m_range: Tuple[float, float] = (-5.0, 5.0),
                    seeds_per_axis: int = SEEDS_PER_AXIS) -> List[CriticalPoint]:
    """All zeros of d(k, m) with m in m_range, sorted by (m, k)."""
    f = _extended_map(family)
    lo, hi = sorted(m_range)
    seeds = seed_points(family, (lo, hi), seeds_per_axis)
    _logger.debug("%d seeds for %s in m=[%g, %g]", len(seeds), family.name, lo, hi)
    found: List[np.ndarray] = []
    for seed in seeds:
        x = newton(f, seed)
        if x is None:
            continue
        x = _wrap(x)
        if not lo - MERGE_TOL <= x[-1] <= hi + MERGE_TOL:
            continue
        if any(_same_point(x, y) for y in found):
            continue
        found.append(x)

    dim = family.dim
    points = []
    for x in sorted(found, key=lambda p: (round(p[-1], 9),) + tuple(np.round(p[:-1], 9))):
        det = float(np.linalg.det(jacobian(f, x)))
        degenerate = abs(det) < DEGENERATE_DET
        sign = 0 if degenerate else int(np.sign(det))
        jump = -((-1) ** dim) * sign
        bifurcation = abs(x[-1]) < MERGE_TOL
        degree = sign if bifurcation else -int(np.sign(x[-1])) * jump
        points.append(CriticalPoint(location=tuple(float(v) for v in x), jacobian_det=det,
                                    jacobian_sign=sign, degree=degree, jump=jump,
                                    residual=float(np.linalg.norm(f(x))),
                                    degenerate=degenerate, bifurcation=bifurcation))
    _logger.info("%d critical points for %s", len(points), family.name)
    return points


def critical_masses(points: Sequence[CriticalPoint]) -> List[float]:
    masses = OrderedSet()
    for point in points:
        if not any(abs(point.m - m) < MERGE_TOL for m in masses):
            masses.add(point.m)
    return sorted(masses)


# Phase diagram


class PhaseInterval(SimpleClass):
    """Open mass interval (lo, hi), either end possibly infinite."""

    lo: float
    hi: float
    value: int

    def contains(self, m: float) -> bool:
        return self.lo < m < self.hi

    def to_dict(self):
        return dict(m_lo=self.lo, m_hi=self.hi, value=self.value)

    def __repr__(self):
        return f"<PhaseInterval ({self.lo}, {self.hi}): {self.value}>"


def default_invariant(family: DVectorModel) -> str:
    return 'chern' if family.dim == 2 else 'gauss'


def invariant_at(family: DVectorModel, m: float, invariant: str, grid: Optional[int] = None) -> int:
    model = family.with_mass(m)
    if invariant == 'chern':
        return chern_number_2d(model, grid or 24).value
    if invariant == 'gauss':
        return gauss_degree(model, grid or 48).value
    raise ValueError(f"Unknown invariant '{invariant}'")


def critical_window(family: DVectorModel, per_axis: int = WINDOW_GRID) -> Optional[Tuple[float, float]]:
    """
    Mass range holding every zero of d(k, m), for families where m enters
    only as m + g(k) in the last component: a zero needs m = -g(k).  The
    bound is the grid maximum of |g| plus one unit.  None for families
    of any other form.
    """
    ks = kgrid(family.dim, per_axis)
    base = np.real(family.d_family(ks, 0.0))
    unit = np.zeros(base.shape[-1])
    unit[-1] = 1.0
    for m in (1.0, -2.5):
        if not np.allclose(np.real(family.d_family(ks, m)) - base, m * unit, atol=1e-12):
            return None
    bound = float(np.max(np.abs(base[..., -1]))) + 1.0
    return -bound, bound


def phase_diagram(family: DVectorModel, m_samples: Sequence[float], invariant: Optional[str] = None,
                  grid: Optional[int] = None, seeds_per_axis: int = SEEDS_PER_AXIS) -> List[PhaseInterval]:
    """
    Invariant on each interval between consecutive critical masses, from
    the samples that fall inside it (midpoint, or one unit beyond the last
    critical mass, for intervals without samples).  Adjacent intervals
    with equal values are merged.

    Zeros are searched over the critical window of the family together
    with one unit beyond the samples.  The outer intervals extend to
    infinity only when the window is known to hold every zero; otherwise
    they stop at the edges of the searched range.
    """
    samples = sorted(float(m) for m in m_samples)
    if not samples:
        raise ValueError("No mass samples")
    invariant = invariant or default_invariant(family)
    search = (samples[0] - 1, samples[-1] + 1)
    window = critical_window(family)
    if window is not None:
        search = (min(search[0], window[0]), max(search[1], window[1]))
        outer = (-np.inf, np.inf)
    else:
        _logger.warning("No critical window for %s; phase diagram limited to m in [%g, %g]",
                        family.name, search[0], search[1])
        outer = search
    points = critical_points(family, search, seeds_per_axis)
    masses = critical_masses(points)
    for m in samples:
        for c in masses:
            if abs(m - c) < CRITICAL_GAP:
                raise SampleOnCriticalPoint(msg=f"Sample m={m} is within {CRITICAL_GAP} of critical value {c:.9g}",
                                            m=m, critical=c)

    edges = [outer[0]] + masses + [outer[1]]
    intervals: List[PhaseInterval] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = [m for m in samples if lo < m < hi]
        if not inside:
            if np.isinf(lo) and np.isinf(hi):
                inside = [0.0]
            elif np.isinf(lo):
                inside = [hi - 1]
            elif np.isinf(hi):
                inside = [lo + 1]
            else:
                inside = [(lo + hi) / 2]
        values = OrderedSet(invariant_at(family, m, invariant, grid) for m in inside)
        if len(values) != 1:
            raise NotConverged(msg=f"Invariant not constant on ({lo}, {hi}): {list(values)}")
        value = values[0]
        if intervals and intervals[-1].value == value:
            intervals[-1].hi = hi
        else:
            intervals.append(PhaseInterval(lo=float(lo), hi=float(hi), value=value))
    _logger.info("phase diagram of %s: %s", family.name, intervals)
    return intervals
