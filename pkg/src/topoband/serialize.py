"""
Text renderings of finished results: JSON objects with stable key order
and floats printed to 17 significant digits, and CSV tables.  Both are
locale independent.
"""

import csv
import io
import json
import math
from typing import Any, Iterable, List, Sequence

import numpy as np

from .errors import UnsupportedFormat


FORMATS = ('json', 'csv')


def format_float(x: float) -> str:
    """17 significant digits, always recognizable as a float; infinities
    and NaN as the strings inf, -inf and nan."""
    x = float(x)
    if math.isnan(x):
        return 'nan'
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    text = format(x, '.17g')
    if not any(c in text for c in '.en'):
        text += '.0'
    return text


def as_json_serializable(value: Any) -> Any:
    """Plain dicts, lists, strings, ints, bools and floats.  Objects with
    a to_dict method are expanded; numpy scalars and arrays are unwrapped."""
    if hasattr(value, 'to_dict'):
        return as_json_serializable(value.to_dict())
    if isinstance(value, dict) or hasattr(value, 'items'):
        return {str(k): as_json_serializable(v) for k, v in value.items()}
    if isinstance(value, (str, bool)) or value is None:
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return as_json_serializable(value.tolist())
    if isinstance(value, (list, tuple)) or hasattr(value, '__iter__'):
        return [as_json_serializable(v) for v in value]
    return str(value)


def _emit(value: Any, indent: int, level: int) -> str:
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if not value:
            return '[]'
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_emit(v, indent, level) for v in value) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = format_float(value)
        return json.dumps(text) if text in ('inf', '-inf', 'nan') else text
    return json.dumps(value)


def to_json(result: Any, indent: int = 2) -> str:
    return _emit(as_json_serializable(result), indent, 0) + "\n"


def csv_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([csv_cell(v) for v in row])
    return out.getvalue()


def csv_table(result: Any):
    """(header, rows) for the results that have a tabular form."""
    if hasattr(result, 'header') and hasattr(result, 'rows'):
        return result.header(), list(result.rows())
    if isinstance(result, (list, tuple)) and result and hasattr(result[0], 'to_dict'):
        dicts = [r.to_dict() for r in result]
        header = list(dicts[0])
        rows: List[List[Any]] = []
        for d in dicts:
            row = []
            for key in header:
                value = d[key]
                row.append(";".join(csv_cell(v) for v in value) if isinstance(value, (list, tuple)) else value)
            rows.append(row)
        return header, rows
    if hasattr(result, 'to_dict'):
        d = result.to_dict()
        header = [k for k, v in d.items() if not isinstance(v, (dict, list, tuple))]
        return header, [[d[k] for k in header]]
    raise UnsupportedFormat(msg=f"No CSV form for {type(result).__name__}")


def serialize(result: Any, fmt: str = 'json') -> str:
    if fmt == 'json':
        return to_json(result)
    if fmt == 'csv':
        header, rows = csv_table(result)
        return to_csv(header, rows)
    raise UnsupportedFormat(msg=f"Unknown format '{fmt}'; use json or csv", fmt=fmt)
