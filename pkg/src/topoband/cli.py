"""
Command-line front end.  run(argv) dispatches on the leading words

    invariant {chern|curvature|chern2|winding|z2|z2-3d|gauss|n3|heff}
    classify {entry|torus|table}
    symmetry check
    edge {spectrum|count}
    phase-diagram
    critical-points

and returns the exit status: 0 on success, 2 for usage and contract
errors (the message starts with the error class name), 1 for anything
else.  Results go to stdout, and with --json / --csv also to files,
written atomically.

There is no worker-count option: every command runs in one process,
vectorized over the momentum grid.
"""

from contextlib import redirect_stdout
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import plac

from bandcore.dbfutil import GenericException, atomic_write
from .config import RunConfig
from .critical import critical_points, phase_diagram
from .edge import edge_mode_count, ribbon_spectrum
from .errors import TopoBandError, UsageError
from .greens import g0_from_model, heff_invariant, n3_invariant, with_self_energy
from .invariants import (chern_number_2d, gauss_degree, second_chern_4d,
                         winding_number_1d, winding_number_3d)
from .ktable import format_table, generate_periodic_table, ko_torus, table_entry
from .models import DVectorModel, build_model
from .serialize import serialize, to_csv
from .symmetry import SymmetryCandidate, detect_class, unitary_preset
from .wilson import berry_curvature
from .z2 import z2_index_2d, z2_strong_3d


_logger = logging.getLogger(__name__)


INVARIANTS = ('chern', 'curvature', 'chern2', 'winding', 'z2', 'z2-3d', 'gauss', 'n3', 'heff')
CLASSIFY_ACTIONS = ('entry', 'torus', 'table')
EDGE_ACTIONS = ('spectrum', 'count')


class Output(object):
    """Collects what a command prints and the files it writes."""

    def __init__(self, config: RunConfig, stdout):
        self.config = config
        self.stdout = stdout

    def emit(self, result: Any, text: Optional[str] = None, csv_text: Optional[str] = None):
        fmt = self.config['format']
        json_path = self.config.get('json')
        csv_path = self.config.get('csv')
        if json_path:
            atomic_write(json_path, serialize(result, 'json'))
        if csv_path:
            atomic_write(csv_path, csv_text if csv_text is not None else serialize(result, 'csv'))
        if fmt == 'text' and text is not None:
            self.stdout.write(text)
        elif fmt == 'csv':
            self.stdout.write(csv_text if csv_text is not None else serialize(result, 'csv'))
        else:
            self.stdout.write(serialize(result, 'json'))


def _cli_values(**kwargs) -> Dict[str, Any]:
    renames = {'nocc': 'n_occ', 'fmt': 'format'}
    return {renames.get(k, k): v for k, v in kwargs.items()}


def _float_list(text: str) -> List[float]:
    try:
        return [float(tok) for tok in text.replace(',', ' ').split()]
    except ValueError:
        raise UsageError(msg=f"Cannot read '{text}' as a list of numbers")


# Each command function is called through plac.call, which builds its
# parser from the annotations.  Options carry an explicit one-letter
# abbreviation so plac gives them a --long form.


def invariant_command(kind: ("Invariant to compute", "positional", None, str, INVARIANTS),
                      model: ("Registered model name", "option", "n", str) = None,
                      m: ("Mass parameter m", "option", "M", float) = None,
                      t1: ("SSH intracell hopping", "option", "a", float) = None,
                      t2: ("SSH intercell hopping", "option", "b", float) = None,
                      eps: ("Spin-mixing strength", "option", "e", float) = None,
                      nocc: ("Number of occupied bands", "option", "N", int) = None,
                      grid: ("Grid points per axis", "option", "g", int) = None,
                      kgrid: ("Momentum grid for n3", "option", "k", int) = None,
                      wquad: ("Frequency nodes for n3", "option", "w", int) = None,
                      sigma: ("Static scalar self-energy", "option", "s", float) = None,
                      config: ("Config file of key=value settings", "option", "c", str) = None,
                      json: ("Write the JSON result here", "option", "j", str) = None,
                      csv: ("Write the CSV result here", "option", "v", str) = None,
                      fmt: ("stdout format: json, csv or text", "option", "f", str) = None):
    cfg = RunConfig.resolve(kind, _cli_values(model=model, m=m, t1=t1, t2=t2, eps=eps, nocc=nocc,
                                              grid=grid, kgrid=kgrid, wquad=wquad, sigma=sigma,
                                              json=json, csv=csv, fmt=fmt), config)
    out = Output(cfg, sys.stdout)
    bloch = cfg.model()
    csv_text = None
    if kind == 'chern':
        result = chern_number_2d(bloch, cfg['grid'])
    elif kind == 'curvature':
        field = berry_curvature(bloch, cfg['grid'])
        n = cfg['grid']
        rows = [[i, j, 2 * np.pi * i / n, 2 * np.pi * j / n, field[i, j]] for i in range(n) for j in range(n)]
        csv_text = to_csv(['i', 'j', 'kx', 'ky', 'F'], rows)
        result = dict(name='berry_curvature', grid=n, model=bloch.name, params=dict(bloch.params),
                      total_over_2pi=float(np.sum(field) / (2 * np.pi)))
    elif kind == 'chern2':
        result = second_chern_4d(bloch, cfg['grid'])
    elif kind == 'winding':
        grid = cfg.winding_grid(bloch.dim)
        result = winding_number_1d(bloch, grid) if bloch.dim == 1 else winding_number_3d(bloch, grid)
    elif kind == 'z2':
        result = z2_index_2d(bloch, cfg['grid'])
    elif kind == 'z2-3d':
        result = z2_strong_3d(bloch, cfg['grid'])
    elif kind == 'gauss':
        if not isinstance(bloch, DVectorModel):
            raise UsageError(msg=f"Model {bloch.name} has no d-vector")
        result = gauss_degree(bloch, cfg['grid'])
    else:
        green = g0_from_model(bloch)
        if cfg.get('sigma') is not None:
            green = with_self_energy(green, cfg['sigma'])
        if kind == 'n3':
            result = n3_invariant(green, cfg['kgrid'], cfg['wquad'])
        else:
            result = heff_invariant(green, cfg['grid'])
    out.emit(result, csv_text=csv_text)


def classify_command(action: ("What to classify", "positional", None, str, CLASSIFY_ACTIONS),
                     label: ("Cartan label (also --class)", "option", "l", str) = None,
                     dim: ("Spatial dimension", "option", "d", int) = None,
                     config: ("Config file of key=value settings", "option", "c", str) = None,
                     json: ("Write the JSON result here", "option", "j", str) = None,
                     fmt: ("stdout format: json or text", "option", "f", str) = None):
    if fmt is None and action == 'table':
        fmt = 'text'
    cfg = RunConfig.resolve('classify', _cli_values(label=label, dim=dim, json=json, fmt=fmt), config)
    out = Output(cfg, sys.stdout)
    if action == 'table':
        table = generate_periodic_table(8)
        out.emit(table, text=format_table(table))
        return
    entry_label, d = cfg['label'], cfg['dim']
    if action == 'entry':
        group = table_entry(entry_label, d)
        result = dict(label=entry_label, dim=d, group=str(group), even=group.even)
        out.emit(result, text=f"{entry_label} d={d}: {group}\n")
    else:
        torus = ko_torus(entry_label, d)
        out.emit(torus, text=f"{entry_label} T^{d}: band_and_weak = {torus.band_and_weak}, "
                             f"strong = {torus.strong}\n")


def symmetry_command(action: ("Only 'check'", "positional", None, str, ('check',)),
                     model: ("Registered model name", "option", "n", str) = None,
                     m: ("Mass parameter m", "option", "M", float) = None,
                     t1: ("SSH intracell hopping", "option", "a", float) = None,
                     t2: ("SSH intercell hopping", "option", "b", float) = None,
                     eps: ("Spin-mixing strength", "option", "e", float) = None,
                     nocc: ("Number of occupied bands", "option", "N", int) = None,
                     tr: ("Time-reversal unitary part (preset or inline list)", "option", "T", str) = None,
                     ph: ("Particle-hole unitary part", "option", "P", str) = None,
                     chiral: ("Chiral unitary part", "option", "C", str) = None,
                     grid: ("Grid points per axis", "option", "g", int) = None,
                     config: ("Config file of key=value settings", "option", "c", str) = None,
                     json: ("Write the JSON result here", "option", "j", str) = None,
                     fmt: ("stdout format: json or csv", "option", "f", str) = None):
    cfg = RunConfig.resolve('symmetry', _cli_values(model=model, m=m, t1=t1, t2=t2, eps=eps, nocc=nocc,
                                                    tr=tr, ph=ph, chiral=chiral, grid=grid,
                                                    json=json, fmt=fmt), config)
    out = Output(cfg, sys.stdout)
    bloch = cfg.model()
    given = [(kind, cfg.get(key)) for kind, key in (('TR', 'tr'), ('PH', 'ph'), ('CHIRAL', 'chiral'))]
    candidates = None
    if any(spec is not None for _, spec in given):
        candidates = [SymmetryCandidate(kind, unitary_preset(spec, bloch.n_orb))
                      for kind, spec in given if spec is not None]
    az, checks = detect_class(bloch, candidates, cfg['grid'])
    result = dict(model=bloch.name, params=dict(bloch.params), classification=az.to_dict(),
                  checks=[c.to_dict() for c in checks])
    out.emit(result)


def edge_command(action: ("spectrum or count", "positional", None, str, EDGE_ACTIONS),
                 model: ("Registered model name", "option", "n", str) = None,
                 m: ("Mass parameter m", "option", "M", float) = None,
                 eps: ("Spin-mixing strength", "option", "e", float) = None,
                 nocc: ("Number of occupied bands", "option", "N", int) = None,
                 width: ("Ribbon width in cells", "option", "W", int) = None,
                 samples: ("Number of k_par samples", "option", "k", int) = None,
                 edge: ("Edge to count on: lower or upper", "option", "E", str) = None,
                 config: ("Config file of key=value settings", "option", "c", str) = None,
                 json: ("Write the JSON result here", "option", "j", str) = None,
                 csv: ("Write the CSV spectrum here", "option", "v", str) = None,
                 fmt: ("stdout format: json or csv", "option", "f", str) = None):
    cfg = RunConfig.resolve('edge', _cli_values(model=model, m=m, eps=eps, nocc=nocc, width=width,
                                                samples=samples, edge=edge, json=json, csv=csv,
                                                fmt=fmt), config)
    out = Output(cfg, sys.stdout)
    bloch = cfg.model()
    if action == 'spectrum':
        spectrum = ribbon_spectrum(bloch, cfg['width'], cfg['samples'])
        summary = dict(model=bloch.name, params=dict(bloch.params), width=spectrum.width,
                       samples=len(spectrum.k_par), min_abs_energy=float(np.min(np.abs(spectrum.energies))))
        out.emit(summary, csv_text=serialize(spectrum, 'csv'))
    else:
        count = edge_mode_count(bloch, cfg['width'], cfg['samples'], cfg['edge'])
        out.emit(count)


def phase_diagram_command(model: ("Registered model family", "option", "n", str) = None,
                          masses: ("Comma-separated mass samples (use --masses=...)", "option", "S", str) = None,
                          mlo: ("Lowest mass sample", "option", "L", float) = None,
                          mhi: ("Highest mass sample", "option", "H", float) = None,
                          count: ("Number of evenly spaced samples", "option", "C", int) = None,
                          invariant: ("chern or gauss", "option", "i", str) = None,
                          grid: ("Grid points per axis", "option", "g", int) = None,
                          seeds: ("Seeds per axis for the zero search", "option", "s", int) = None,
                          config: ("Config file of key=value settings", "option", "c", str) = None,
                          json: ("Write the JSON result here", "option", "j", str) = None,
                          csv: ("Write the CSV rows here", "option", "v", str) = None,
                          fmt: ("stdout format: json or csv", "option", "f", str) = None):
    cfg = RunConfig.resolve('phase-diagram', _cli_values(model=model, masses=masses, mlo=mlo, mhi=mhi,
                                                         count=count, invariant=invariant, grid=grid,
                                                         seeds=seeds, json=json, csv=csv, fmt=fmt), config)
    out = Output(cfg, sys.stdout)
    family = _family(cfg)
    if cfg.get('masses'):
        samples = _float_list(cfg['masses'])
    else:
        samples = list(np.linspace(cfg['mlo'], cfg['mhi'], cfg['count']))
    intervals = phase_diagram(family, samples, cfg.get('invariant'), cfg.get('grid'), cfg['seeds'])
    out.emit(intervals)


def critical_points_command(model: ("Registered model family", "option", "n", str) = None,
                            mlo: ("Lower end of the mass window", "option", "L", float) = None,
                            mhi: ("Upper end of the mass window", "option", "H", float) = None,
                            seeds: ("Seeds per axis", "option", "s", int) = None,
                            config: ("Config file of key=value settings", "option", "c", str) = None,
                            json: ("Write the JSON result here", "option", "j", str) = None,
                            csv: ("Write the CSV rows here", "option", "v", str) = None,
                            fmt: ("stdout format: json or csv", "option", "f", str) = None):
    cfg = RunConfig.resolve('critical-points', _cli_values(model=model, mlo=mlo, mhi=mhi, seeds=seeds,
                                                           json=json, csv=csv, fmt=fmt), config)
    out = Output(cfg, sys.stdout)
    points = critical_points(_family(cfg), (cfg['mlo'], cfg['mhi']), cfg['seeds'])
    out.emit(points)


def _family(cfg: RunConfig) -> DVectorModel:
    spec = cfg.model_spec()
    spec.setdefault('m', 0.0)
    family = build_model(spec)
    if not isinstance(family, DVectorModel):
        raise UsageError(msg=f"Model {family.name} is not a d-vector family")
    return family


COMMANDS: Dict[str, Callable] = {
    'invariant': invariant_command,
    'classify': classify_command,
    'symmetry': symmetry_command,
    'edge': edge_command,
    'phase-diagram': phase_diagram_command,
    'critical-points': critical_points_command,
}


def _rewrite(args: Sequence[str]) -> List[str]:
    """--class is a Python keyword, so it travels as --label."""
    out = []
    for arg in args:
        if arg == '--class':
            arg = '--label'
        elif arg.startswith('--class='):
            arg = '--label=' + arg[len('--class='):]
        out.append(arg)
    return out


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(argv)
    if argv and argv[0] in ('-h', '--help'):
        stdout.write(__doc__.lstrip())
        return 0
    if not argv or argv[0] not in COMMANDS:
        stderr.write(f"UsageError: expected one of {', '.join(COMMANDS)}\n")
        return 2
    command = COMMANDS[argv[0]]
    try:
        with redirect_stdout(stdout):
            plac.call(command, _rewrite(argv[1:]))
    except SystemExit as e:
        # argparse reports bad flags this way
        return 0 if e.code in (0, None) else 2
    except TopoBandError as e:
        _logger.debug("Contract error", exc_info=True)
        stderr.write(f"{e}\n")
        return 2
    except GenericException as e:
        stderr.write(f"UsageError: {e}\n")
        return 2
    except Exception as e:
        _logger.exception("Internal error")
        stderr.write(f"InternalError: {type(e).__name__}: {e}\n")
        return 1
    return 0

