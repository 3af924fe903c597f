"""
The periodic table of free-fermion topological phases as index
arithmetic on the Bott clock: classifying spaces R_q (q mod 8) and C_q
(q mod 2), their pi_0 groups, table entries for sphere models and the
stacking decomposition for torus models.
"""

import logging
import re
from collections import Counter
from typing import Dict, List, Tuple

from frozendict import frozendict
from scipy import special

from bandcore.dbfutil import SimpleClass
from .errors import ComplexClassUnsupported, UnknownLabel
from .symmetry import CARTAN_LABELS, COMPLEX_INDEX, REAL_INDEX


_logger = logging.getLogger(__name__)


SUMMANDS = ('Z', 'Z2')
DIRECT_SUM = ' ⊕ '


class AbelianGroupExpr(SimpleClass):
    """
    Finite direct sum of Z and Z2 summands.  even marks an entry whose Z
    invariant only takes even values (the 2Z refinement); it is an
    annotation and takes no part in equality.
    """

    counts: frozendict
    even: bool

    def __init__(self, z: int = 0, z2: int = 0, even: bool = False):
        if z < 0 or z2 < 0:
            raise ValueError("Multiplicities must be nonnegative")
        super().__init__(counts=frozendict(Z=int(z), Z2=int(z2)), even=bool(even))

    @property
    def z(self) -> int:
        return self.counts['Z']

    @property
    def z2(self) -> int:
        return self.counts['Z2']

    def is_trivial(self) -> bool:
        return self.z == 0 and self.z2 == 0

    def __add__(self, other: 'AbelianGroupExpr') -> 'AbelianGroupExpr':
        return AbelianGroupExpr(self.z + other.z, self.z2 + other.z2)

    def __mul__(self, n: int) -> 'AbelianGroupExpr':
        return AbelianGroupExpr(self.z * n, self.z2 * n, self.even and n == 1)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, str):
            other = AbelianGroupExpr.parse(other)
        if not isinstance(other, AbelianGroupExpr):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self):
        return hash(self.counts)

    def __str__(self):
        parts = []
        for name in SUMMANDS:
            n = self.counts[name]
            if n == 1:
                parts.append(name)
            elif n > 1:
                parts.append(f"{n}{name}")
        return DIRECT_SUM.join(parts) if parts else '0'

    def __repr__(self):
        return f"<AbelianGroupExpr {self}{' (even)' if self.even else ''}>"

    @classmethod
    def parse(cls, text: str) -> 'AbelianGroupExpr':
        """Inverse of str(); '+' is accepted for the direct sum and '2Z'
        sets the even annotation."""
        counts = Counter()
        even = False
        for term in re.split(r'\s*[⊕+]\s*', text.strip()):
            if term in ('', '0'):
                continue
            if term == '2Z':
                counts['Z'] += 1
                even = True
                continue
            m = re.fullmatch(r'(\d*)(Z2|Z)', term)
            if not m:
                raise ValueError(f"Cannot parse group term '{term}'")
            counts[m.group(2)] += int(m.group(1) or 1)
        return cls(counts['Z'], counts['Z2'], even)


TRIVIAL = AbelianGroupExpr()
INTEGERS = AbelianGroupExpr(z=1)
PARITY = AbelianGroupExpr(z2=1)


REAL_PI0 = (INTEGERS, PARITY, PARITY, TRIVIAL, INTEGERS, TRIVIAL, TRIVIAL, TRIVIAL)
COMPLEX_PI0 = (INTEGERS, TRIVIAL)


class ClassifyingSpace(SimpleClass):

    family: str
    q: int

    def __init__(self, family: str, q: int):
        if family not in ('R', 'C'):
            raise ValueError(f"Family must be R or C, got {family}")
        super().__init__(family=family, q=q % (8 if family == 'R' else 2))

    @property
    def is_real(self) -> bool:
        return self.family == 'R'

    @property
    def cartan_label(self) -> str:
        index = REAL_INDEX if self.is_real else COMPLEX_INDEX
        return next(label for label, q in index.items() if q == self.q)

    @classmethod
    def for_label(cls, label: str) -> 'ClassifyingSpace':
        if label in REAL_INDEX:
            return cls('R', REAL_INDEX[label])
        if label in COMPLEX_INDEX:
            return cls('C', COMPLEX_INDEX[label])
        raise UnknownLabel(msg=f"Unknown Cartan label '{label}'", label=label)

    def shifted(self, steps: int) -> 'ClassifyingSpace':
        return ClassifyingSpace(self.family, self.q + steps)

    def __eq__(self, other):
        return isinstance(other, ClassifyingSpace) and (self.family, self.q) == (other.family, other.q)

    def __hash__(self):
        return hash((self.family, self.q))

    def __str__(self):
        return f"{self.family}{self.q}"


def pi0(space: ClassifyingSpace) -> AbelianGroupExpr:
    if space.is_real:
        return REAL_PI0[space.q]
    return COMPLEX_PI0[space.q]


def table_entry(cartan_label: str, d: int) -> AbelianGroupExpr:
    """pi_0 of R_(q-d) or C_(q-d); a Z entry at (q - d) = 4 mod 8 is
    flagged even."""
    if d < 0:
        raise ValueError(f"Dimension must be nonnegative, got {d}")
    space = ClassifyingSpace.for_label(cartan_label).shifted(-d)
    group = pi0(space)
    if space.is_real and space.q == 4:
        group = AbelianGroupExpr(group.z, group.z2, even=True)
    return group


class PeriodicTable(SimpleClass):
    """Rows keyed by Cartan label in the order A, AIII, AI, BDI, D, DIII,
    AII, CII, C, CI; columns d = 0 .. d_max - 1."""

    rows: frozendict
    d_max: int

    def entry(self, label: str, d: int) -> AbelianGroupExpr:
        return self.rows[label][d]

    def to_dict(self) -> Dict:
        return {label: [str(g) for g in row] for label, row in self.rows.items()}


def generate_periodic_table(d_max: int = 8) -> PeriodicTable:
    rows = {label: tuple(table_entry(label, d) for d in range(d_max)) for label in CARTAN_LABELS}
    return PeriodicTable(rows=frozendict(rows), d_max=d_max)


def format_table(table: PeriodicTable, show_even: bool = False) -> str:
    """Aligned text rendering with a header row of dimensions."""
    def cell(g):
        return '2Z' if show_even and g.even and g == INTEGERS else str(g)

    header = ['Cartan\\d'] + [str(d) for d in range(table.d_max)]
    body = [[label] + [cell(g) for g in row] for label, row in table.rows.items()]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(text.ljust(w) for text, w in zip(r, widths)).rstrip() for r in [header] + body]
    return "\n".join(lines) + "\n"


class TorusGroups(SimpleClass):

    label: str
    d: int
    band_and_weak: AbelianGroupExpr
    strong: AbelianGroupExpr
    terms: Tuple[Tuple[int, int, AbelianGroupExpr], ...]

    def to_dict(self) -> Dict:
        return dict(label=self.label, d=self.d, band_and_weak=str(self.band_and_weak),
                    strong=str(self.strong),
                    terms=[dict(s=s, multiplicity=n, group=str(g)) for s, n, g in self.terms])


def ko_torus(cartan_label: str, d: int) -> TorusGroups:
    """
    band_and_weak = sum over s = 0 .. d-1 of C(d, s) pi_0(R_(q-s)), the
    phases stacked from lower-dimensional ones, and strong = pi_0(R_(q-d)).
    """
    space = ClassifyingSpace.for_label(cartan_label)
    if not space.is_real:
        raise ComplexClassUnsupported(msg=f"Class {cartan_label} is complex; torus decomposition covers real classes only",
                                      label=cartan_label)
    if d < 1:
        raise ValueError(f"Torus dimension must be at least 1, got {d}")
    terms: List[Tuple[int, int, AbelianGroupExpr]] = []
    total = TRIVIAL
    for s in range(d):
        multiplicity = int(special.comb(d, s, exact=True))
        group = pi0(space.shifted(-s))
        terms.append((s, multiplicity, group))
        total = total + multiplicity * group
    strong = table_entry(cartan_label, d)
    _logger.debug("KO(T^%d) for %s: %s weak, %s strong", d, cartan_label, total, strong)
    return TorusGroups(label=cartan_label, d=d, band_and_weak=total, strong=strong, terms=tuple(terms))
