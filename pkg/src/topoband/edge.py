"""
Ribbon geometry: the 2D model is kept periodic along x (momentum k_par)
and cut open along y into W cells.  Edge modes are the in-gap states
localized in the outer quarter of the strip; their signed crossings of
E = 0 give the number of chiral modes per edge.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from bandcore.dbfutil import SimpleClass
from .errors import DimensionMismatch, EdgesHybridized, GapClosed, LongRangeModel, WidthTooSmall
from .linalg import dagger, eigh_stack
from .models import GAP_TOL, BlochModel, minimum_gap


_logger = logging.getLogger(__name__)


FOURIER_SAMPLES = 8
LONG_RANGE_TOL = 1e-10
EDGE_WEIGHT = 0.6
HYBRIDIZATION_TOL = 1e-3
DEGENERACY_TOL = 1e-9
MIN_COUNT_WIDTH = 4
DEFAULT_WIDTH = 30
DEFAULT_K_GRID = 201


def hopping_blocks(model: BlochModel, k_par: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    (h0, h1) with H(k_par, ky) = h0 + h1 exp(i ky) + h1^dagger exp(-i ky),
    from a discrete Fourier transform over ky.  Harmonics beyond the first
    raise LongRangeModel.
    """
    if model.dim != 2:
        raise DimensionMismatch(msg=f"Ribbons need a 2D model, {model.name} has dim {model.dim}")
    n = FOURIER_SAMPLES
    ky = 2 * np.pi * np.arange(n) / n
    ks = np.stack([np.full(n, float(k_par)), ky], axis=-1)
    coeffs = np.fft.fft(model.hamiltonians(ks), axis=0) / n
    # numpy's forward transform carries exp(-i ky j), so coeffs[1] is the
    # coefficient of exp(+i ky).
    for j in range(2, n - 1):
        size = np.max(np.abs(coeffs[j]))
        if size > LONG_RANGE_TOL:
            raise LongRangeModel(msg=f"Harmonic {min(j, n - j)} along y has weight {size:.3g}", harmonic=j)
    return coeffs[0], coeffs[1]


def ribbon_hamiltonian(model: BlochModel, width: int, k_par: float) -> np.ndarray:
    """Block-tridiagonal (width * n_orb) square matrix; cell y couples to
    y + 1 through h1."""
    if width < 1:
        raise WidthTooSmall(msg=f"Ribbon width {width} < 1", width=width)
    h0, h1 = hopping_blocks(model, k_par)
    n = model.n_orb
    h = np.kron(np.eye(width), h0)
    for y in range(width - 1):
        h[y * n:(y + 1) * n, (y + 1) * n:(y + 2) * n] = h1
        h[(y + 1) * n:(y + 2) * n, y * n:(y + 1) * n] = dagger(h1)
    return (h + dagger(h)) / 2


def k_samples(k_grid: int) -> np.ndarray:
    """k_par = -pi + 2 pi (j + 1/4) / k_grid, which never hits a TRIM."""
    return -np.pi + 2 * np.pi * (np.arange(k_grid) + 0.25) / k_grid


def _edge_weights(vectors: np.ndarray, width: int, n_orb: int) -> Tuple[np.ndarray, np.ndarray]:
    density = np.abs(vectors) ** 2
    per_cell = density.reshape(density.shape[:-2] + (width, n_orb, density.shape[-1])).sum(axis=-2)
    quarter = max(1, width // 4)
    return per_cell[..., :quarter, :].sum(axis=-2), per_cell[..., -quarter:, :].sum(axis=-2)


def _separate_degenerate(values: np.ndarray, vectors: np.ndarray, position: np.ndarray) -> np.ndarray:
    """Within each cluster of degenerate eigenvalues, rotate to eigenvectors
    of the cell position, so states on opposite edges are not mixed."""
    vectors = vectors.copy()
    start = 0
    count = len(values)
    while start < count:
        stop = start + 1
        while stop < count and values[stop] - values[stop - 1] < DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            _, rotation = np.linalg.eigh(dagger(block) @ (position[:, np.newaxis] * block))
            vectors[:, start:stop] = block @ rotation
        start = stop
    return vectors


class RibbonSpectrum(SimpleClass):
    """energies[j] are the ascending eigenvalues at k_par[j]; lower and
    upper are the weights of each state in the small-y and large-y
    quarters of the strip."""

    k_par: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    width: int
    model: str

    def rows(self):
        for k, e in zip(self.k_par, self.energies):
            yield [float(k)] + [float(x) for x in e]

    def header(self):
        return ['k'] + [f"E{i + 1}" for i in range(self.energies.shape[1])]


def ribbon_spectrum(model: BlochModel, width: int = DEFAULT_WIDTH, k_grid: int = DEFAULT_K_GRID) -> RibbonSpectrum:
    ks = k_samples(k_grid)
    hs = np.stack([ribbon_hamiltonian(model, width, k) for k in ks])
    values, vectors = eigh_stack(hs)
    position = np.repeat(np.arange(width, dtype=float), model.n_orb)
    vectors = np.stack([_separate_degenerate(v, u, position) for v, u in zip(values, vectors)])
    lower, upper = _edge_weights(vectors, width, model.n_orb)
    _logger.debug("ribbon of %s: width %d, %d k samples", model.name, width, k_grid)
    return RibbonSpectrum(k_par=ks, energies=values, vectors=vectors, lower=lower, upper=upper,
                          width=width, model=model.name)


class EdgeCount(SimpleClass):

    n_plus: int
    n_minus: int
    per_edge: Dict[str, int]
    helical: bool
    edge: str

    @property
    def net(self) -> int:
        return self.n_plus - self.n_minus

    def to_dict(self):
        return dict(n_plus=self.n_plus, n_minus=self.n_minus, per_edge=dict(self.per_edge),
                    helical_flag=self.helical, edge=self.edge)


def edge_mode_count(model: BlochModel, width: int = DEFAULT_WIDTH, k_grid: int = DEFAULT_K_GRID,
                    edge: str = 'lower') -> EdgeCount:
    """
    Follow every state from k_par to the next sample (the state of largest
    overlap) and count the sign changes of its energy, with the sign of the
    slope, on the edge where the state lives.  n_plus and n_minus count the
    right- and left-moving crossings on the chosen edge.
    """
    if width < MIN_COUNT_WIDTH:
        raise WidthTooSmall(msg=f"Counting edge modes needs width >= {MIN_COUNT_WIDTH}, got {width}", width=width)
    if edge not in ('lower', 'upper'):
        raise ValueError(f"edge must be lower or upper, got {edge}")
    gap = minimum_gap(model, 24)
    if gap <= GAP_TOL:
        raise GapClosed(msg=f"Bulk gap of {model.name} closes (minimum {gap:.3g})", gap=gap)

    spectrum = ribbon_spectrum(model, width, k_grid)
    crossings = {'lower': [0, 0], 'upper': [0, 0]}
    n = len(spectrum.k_par)
    for j in range(n):
        nxt = (j + 1) % n
        overlap = np.abs(dagger(spectrum.vectors[j]) @ spectrum.vectors[nxt]) ** 2
        match = np.argmax(overlap, axis=1)
        e_here = spectrum.energies[j]
        e_next = spectrum.energies[nxt][match]
        for state in np.nonzero(e_here * e_next < 0)[0]:
            lower = spectrum.lower[j, state]
            upper = spectrum.upper[j, state]
            if lower > EDGE_WEIGHT and upper < HYBRIDIZATION_TOL:
                side = 'lower'
            elif upper > EDGE_WEIGHT and lower < HYBRIDIZATION_TOL:
                side = 'upper'
            else:
                raise EdgesHybridized(msg=f"Zero-energy state at k={spectrum.k_par[j]:.6g} has edge weights "
                                          f"{lower:.3g} (lower) and {upper:.3g} (upper); widen the ribbon",
                                      lower=lower, upper=upper)
            rising = e_next[state] > e_here[state]
            crossings[side][0 if rising else 1] += 1
    n_plus, n_minus = crossings[edge]
    per_edge = {side: plus - minus for side, (plus, minus) in crossings.items()}
    result = EdgeCount(n_plus=n_plus, n_minus=n_minus, per_edge=per_edge,
                       helical=n_plus > 0 and n_minus > 0, edge=edge)
    _logger.info("edge modes of %s (width %d): %s", model.name, width, result.to_dict())
    return result
