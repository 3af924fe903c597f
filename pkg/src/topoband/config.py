"""
Run configuration for the command line: built-in defaults, overridden by
a flat key=value config file, overridden by command-line flags.  Keys are
checked against a closed list and numeric values against the
preconditions of the operation they feed.
"""

import logging
from typing import Any, Dict, Mapping, Optional

from frozendict import frozendict

from bandcore.dbfutil import SimpleClass
from bandcore.keyval import KeyValueSyntaxError, read_keyval_file
from .errors import UsageError
from .models import BlochModel, ModelZoo, build_model
from .serialize import FORMATS


_logger = logging.getLogger(__name__)


MODEL_KEYS = ('model', 'm', 't1', 't2', 'eps', 'n_occ')

# Key -> type; a config file may set any of these.
KEY_TYPES: Mapping[str, type] = frozendict(
    model=str, m=float, t1=float, t2=float, eps=float, n_occ=int,
    grid=int, kgrid=int, wquad=int, sigma=float,
    width=int, samples=int, edge=str,
    label=str, dim=int,
    tr=str, ph=str, chiral=str,
    seeds=int, mlo=float, mhi=float, masses=str, count=int, invariant=str,
    json=str, csv=str, format=str,
)

DEFAULTS: Mapping[str, Mapping[str, Any]] = frozendict({
    'chern': frozendict(grid=24),
    'curvature': frozendict(grid=24),
    'chern2': frozendict(grid=12),
    'winding': frozendict(),
    'z2': frozendict(grid=24),
    'z2-3d': frozendict(grid=24),
    'gauss': frozendict(grid=48),
    'n3': frozendict(kgrid=24, wquad=200),
    'heff': frozendict(grid=24),
    'symmetry': frozendict(grid=16),
    'edge': frozendict(width=30, samples=201, edge='lower'),
    'classify': frozendict(),
    'phase-diagram': frozendict(seeds=32, mlo=-4.25, mhi=4.25, count=18),
    'critical-points': frozendict(seeds=32, mlo=-5.0, mhi=5.0),
    'output': frozendict(format='json'),
})

WINDING_GRID = frozendict({1: 64, 3: 20})

# Lower bounds of the integer settings.
MINIMUM = frozendict(grid=2, kgrid=2, wquad=1, width=1, samples=2, seeds=2, count=1, dim=0, n_occ=1)


def coerce(key: str, value: Any) -> Any:
    kind = KEY_TYPES[key]
    try:
        if kind is int and isinstance(value, str) and not value.lstrip('-').isdigit():
            raise ValueError(value)
        return kind(value)
    except (TypeError, ValueError):
        raise UsageError(msg=f"Value '{value}' for {key} is not a valid {kind.__name__}", key=key)


class RunConfig(SimpleClass):
    """
    Settings for one subcommand.  values holds everything that is set,
    from whichever source won.
    """

    subcommand: str
    values: frozendict

    @classmethod
    def resolve(cls, subcommand: str, cli: Optional[Mapping[str, Any]] = None,
                config_file: Optional[str] = None) -> 'RunConfig':
        merged: Dict[str, Any] = dict(DEFAULTS['output'])
        merged.update(DEFAULTS.get(subcommand, {}))
        if config_file is not None:
            try:
                from_file = read_keyval_file(config_file)
            except (OSError, KeyValueSyntaxError) as e:
                raise UsageError(msg=f"Cannot read config file {config_file}: {e}")
            unknown = sorted(set(from_file) - set(KEY_TYPES))
            if unknown:
                raise UsageError(msg=f"Unknown config keys: {', '.join(unknown)}", unknown=unknown)
            merged.update({key: coerce(key, val) for key, val in from_file.items()})
        for key, val in (cli or {}).items():
            if val is None:
                continue
            if key not in KEY_TYPES:
                raise UsageError(msg=f"Unknown setting {key}")
            merged[key] = coerce(key, val)
        config = cls(subcommand=subcommand, values=frozendict(merged))
        config.validate()
        _logger.debug("Resolved %s config: %s", subcommand, dict(config.values))
        return config

    def validate(self):
        for key, low in MINIMUM.items():
            if key in self.values and self.values[key] < low:
                raise UsageError(msg=f"{key}={self.values[key]} is below the minimum {low}", key=key)
        if self.subcommand in ('z2', 'z2-3d') and self.values.get('grid', 0) % 2:
            raise UsageError(msg=f"Z2 grid must be even, got {self.values['grid']}")
        if self.subcommand in ('z2', 'z2-3d') and self.values.get('grid', 4) < 4:
            raise UsageError(msg="Z2 grid must be at least 4")
        if self.values.get('format') not in FORMATS + ('text',):
            raise UsageError(msg=f"Unknown output format '{self.values.get('format')}'")
        if self.values.get('edge', 'lower') not in ('lower', 'upper'):
            raise UsageError(msg=f"edge must be lower or upper, got {self.values['edge']}")
        if 'model' in self.values and self.values['model'] not in ModelZoo.names():
            raise UsageError(msg=f"Unknown model '{self.values['model']}'; known: {', '.join(ModelZoo.names())}")

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def __getitem__(self, key: str) -> Any:
        if key not in self.values:
            raise UsageError(msg=f"Missing setting '{key}'", key=key)
        return self.values[key]

    def model_spec(self) -> Dict[str, Any]:
        spec = {key: self.values[key] for key in MODEL_KEYS if key in self.values}
        if 'model' not in spec:
            raise UsageError(msg="No model given (use --model)")
        return spec

    def model(self) -> BlochModel:
        return build_model(self.model_spec())

    def winding_grid(self, dim: int) -> int:
        if 'grid' in self.values:
            return self.values['grid']
        if dim not in WINDING_GRID:
            raise UsageError(msg=f"No winding number in dimension {dim}")
        return WINDING_GRID[dim]
