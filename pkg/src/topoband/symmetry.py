"""
Verification of time-reversal (TR), particle-hole (PH) and chiral
symmetries of a BlochModel, and the Altland-Zirnbauer label they imply.

Symmetries are verified, never searched for: callers supply the unitary
part U of each candidate.  For the antiunitary kinds the operator acts as
psi -> U conj(psi), so
    TR:     U H(k)* U^dagger = H(-k)
    PH:     U H(k)* U^dagger = -H(-k)
    CHIRAL: U H(k) U^dagger = -H(k)
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from frozendict import frozendict
import numpy as np
from ordered_set import OrderedSet

from bandcore.dbfutil import SimpleClass
from .errors import DimensionMismatch, InconsistentInput
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, dagger
from .models import BlochModel, kgrid


_logger = logging.getLogger(__name__)


SYMMETRY_TOL = 1e-8
UNITARY_TOL = 1e-10
DEFAULT_GRID = 16

KINDS = ('TR', 'PH', 'CHIRAL')


class SymmetryCandidate(SimpleClass):

    kind: str
    unitary_part: np.ndarray
    antiunitary: bool

    def __init__(self, kind: str, unitary_part):
        if kind not in KINDS:
            raise InconsistentInput(msg=f"Unknown symmetry kind '{kind}'", kind=kind)
        u = np.asarray(unitary_part, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatch(msg=f"Unitary part must be square, got shape {u.shape}")
        if np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))) > UNITARY_TOL:
            raise InconsistentInput(msg=f"{kind} unitary part is not unitary")
        super().__init__(kind=kind, unitary_part=u, antiunitary=kind != 'CHIRAL')

    def apply(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        if self.antiunitary:
            return self.unitary_part @ np.conj(psi)
        return self.unitary_part @ psi

    def __repr__(self):
        return f"<SymmetryCandidate {self.kind} {self.unitary_part.shape[0]}x{self.unitary_part.shape[0]}>"


class SymmetryCheck(SimpleClass):

    candidate: SymmetryCandidate
    holds: bool
    square: Optional[int]
    max_violation: float

    @property
    def kind(self):
        return self.candidate.kind

    def to_dict(self) -> Dict:
        return dict(kind=self.kind, holds=self.holds, square=self.square,
                    max_violation=self.max_violation)


def antiunitary_square(u: np.ndarray) -> Optional[int]:
    """s with U U* = s * identity, or None when U U* is not +-1."""
    m = u @ np.conj(u)
    n = u.shape[0]
    for s in (1, -1):
        if np.max(np.abs(m - s * np.eye(n))) < SYMMETRY_TOL:
            return s
    return None


def check_symmetry(model: BlochModel, cand: SymmetryCandidate, grid: int = DEFAULT_GRID) -> SymmetryCheck:
    u = cand.unitary_part
    if u.shape[0] != model.n_orb:
        raise DimensionMismatch(msg=f"{cand.kind} operator is {u.shape[0]}x{u.shape[0]}, model has {model.n_orb} orbitals")
    ks = kgrid(model.dim, grid)
    h = model.hamiltonians(ks)
    ud = dagger(u)
    if cand.kind == 'CHIRAL':
        residual = u @ h @ ud + h
    else:
        h_minus = model.hamiltonians(-ks)
        transformed = u @ np.conj(h) @ ud
        residual = transformed - h_minus if cand.kind == 'TR' else transformed + h_minus
    violation = float(np.max(np.linalg.norm(residual, ord=2, axis=(-2, -1)), initial=0.0))
    holds = violation < SYMMETRY_TOL
    square = antiunitary_square(u) if cand.antiunitary else None
    _logger.debug("%s on %s: violation %.3g square %s", cand.kind, model.name, violation, square)
    return SymmetryCheck(candidate=cand, holds=holds, square=square, max_violation=violation)


# Cartan labels by (T^2, C^2, chiral); None means absent.
AZ_TABLE: Mapping[Tuple[Optional[int], Optional[int], bool], str] = frozendict({
    (None, None, False): 'A',
    (None, None, True): 'AIII',
    (1, None, False): 'AI',
    (1, 1, True): 'BDI',
    (None, 1, False): 'D',
    (-1, 1, True): 'DIII',
    (-1, None, False): 'AII',
    (-1, -1, True): 'CII',
    (None, -1, False): 'C',
    (1, -1, True): 'CI',
})

# Position on the eight-hour clock of the real classes, and the two
# complex classes.
REAL_INDEX = frozendict({'AI': 0, 'BDI': 1, 'D': 2, 'DIII': 3, 'AII': 4, 'CII': 5, 'C': 6, 'CI': 7})
COMPLEX_INDEX = frozendict({'A': 0, 'AIII': 1})
CARTAN_LABELS = ('A', 'AIII', 'AI', 'BDI', 'D', 'DIII', 'AII', 'CII', 'C', 'CI')


class AZClassification(SimpleClass):

    cartan_label: str
    t_square: Optional[int]
    c_square: Optional[int]
    has_chiral: bool
    real_index_q: Optional[int]
    complex_index: Optional[int]
    tc_commute: Optional[bool]

    @property
    def is_real(self) -> bool:
        return self.real_index_q is not None

    def to_dict(self) -> Dict:
        return dict(cartan_label=self.cartan_label, t_square=self.t_square, c_square=self.c_square,
                    has_chiral=self.has_chiral, real_index_q=self.real_index_q,
                    complex_index=self.complex_index, tc_commute=self.tc_commute)


def classify_flags(t_square: Optional[int], c_square: Optional[int], has_chiral: bool,
                   tc_commute: Optional[bool] = None) -> AZClassification:
    key = (t_square, c_square, bool(has_chiral))
    if key not in AZ_TABLE:
        raise InconsistentInput(msg=f"No AZ class has T^2={t_square}, C^2={c_square}, chiral={has_chiral}")
    label = AZ_TABLE[key]
    return AZClassification(cartan_label=label, t_square=t_square, c_square=c_square,
                            has_chiral=bool(has_chiral), real_index_q=REAL_INDEX.get(label),
                            complex_index=COMPLEX_INDEX.get(label), tc_commute=tc_commute)


def az_class(results: Iterable[SymmetryCheck], model: Optional[BlochModel] = None,
             grid: int = DEFAULT_GRID) -> AZClassification:
    """
    Cartan label from the passing symmetry checks.  When both TR and PH
    pass, their composition S = U_T U_C* is the chiral operator; with a
    model at hand it is checked on the grid rather than taken for granted.
    Commutation of T and C is recorded in tc_commute but not enforced.
    """
    passing: Dict[str, SymmetryCheck] = {}
    for result in results:
        if not result.holds:
            continue
        if result.kind in passing:
            raise InconsistentInput(msg=f"More than one passing {result.kind} candidate")
        passing[result.kind] = result
    tr, ph, ch = passing.get('TR'), passing.get('PH'), passing.get('CHIRAL')
    for check in (tr, ph):
        if check is not None and check.square is None:
            raise InconsistentInput(msg=f"{check.kind} operator does not square to +-1")
    tc_commute = None
    has_chiral = ch is not None
    if tr is not None and ph is not None:
        ut, uc = tr.candidate.unitary_part, ph.candidate.unitary_part
        tc_commute = bool(np.max(np.abs(ut @ np.conj(uc) - uc @ np.conj(ut))) < SYMMETRY_TOL)
        composed = SymmetryCandidate('CHIRAL', ut @ np.conj(uc))
        if model is not None:
            derived = check_symmetry(model, composed, grid)
            if not derived.holds:
                raise InconsistentInput(msg=f"TR and PH pass but their composition is not a chiral symmetry "
                                            f"(violation {derived.max_violation:.3g})")
        has_chiral = True
    elif has_chiral and (tr is not None or ph is not None):
        raise InconsistentInput(msg="Chiral symmetry with a single antiunitary symmetry implies the other")
    return classify_flags(tr.square if tr else None, ph.square if ph else None, has_chiral, tc_commute)


def model_candidates(model: BlochModel) -> List[SymmetryCandidate]:
    """Candidates from the operators registered on the model."""
    found = OrderedSet()
    for kind in KINDS:
        u = model.symmetry(kind)
        if u is not None:
            found.add(kind)
    return [SymmetryCandidate(kind, model.symmetry(kind)) for kind in found]


def detect_class(model: BlochModel, candidates: Optional[Iterable[SymmetryCandidate]] = None,
                 grid: int = DEFAULT_GRID) -> Tuple[AZClassification, List[SymmetryCheck]]:
    if candidates is None:
        candidates = model_candidates(model)
    checks = [check_symmetry(model, cand, grid) for cand in candidates]
    return az_class(checks, model, grid), checks


def verified_operator(model: BlochModel, kind: str, unitary_part: Optional[np.ndarray] = None,
                      grid: int = DEFAULT_GRID) -> Optional[SymmetryCheck]:
    """Check the given (or the model's registered) operator of one kind;
    None when there is nothing to check."""
    if unitary_part is None:
        unitary_part = model.symmetry(kind)
    if unitary_part is None:
        return None
    return check_symmetry(model, SymmetryCandidate(kind, unitary_part), grid)


def unitary_preset(name: str, n_orb: int) -> np.ndarray:
    """
    Named unitary parts: identity, pauli_x/pauli_y/pauli_z acting on the
    spin block (sigma (x) 1), kramers (i sigma_y (x) 1), or an inline
    row-major list of n_orb**2 complex entries such as "0,1,1,0" or
    "1j,0,0,-1j".
    """
    half = np.eye(max(n_orb // 2, 1))
    presets = {
        'identity': lambda: np.eye(n_orb, dtype=complex),
        'pauli_x': lambda: np.kron(SIGMA_X, half),
        'pauli_y': lambda: np.kron(SIGMA_Y, half),
        'pauli_z': lambda: np.kron(SIGMA_Z, half),
        'kramers': lambda: np.kron(1j * SIGMA_Y, half),
    }
    if name in presets:
        u = presets[name]()
    else:
        try:
            entries = [complex(tok.strip().replace('i', 'j')) for tok in name.split(',')]
        except ValueError:
            raise InconsistentInput(msg=f"Unknown operator preset '{name}'")
        if len(entries) != n_orb * n_orb:
            raise DimensionMismatch(msg=f"Inline operator has {len(entries)} entries, need {n_orb * n_orb}")
        u = np.array(entries, dtype=complex).reshape(n_orb, n_orb)
    if u.shape != (n_orb, n_orb):
        raise DimensionMismatch(msg=f"Preset {name} does not fit {n_orb} orbitals")
    return u

