"""
Parsing of the flat key=value form used for model specs and config files,
e.g. "model=qahe2d m=1.0 n_occ=1".  Values stay strings; callers coerce.
"""

import re
from typing import Dict, Iterable

from frozendict import frozendict

from .dbfutil import GenericException, file_lines


KEYVAL = re.compile(r'(\w+)=(\S+)')


class KeyValueSyntaxError(GenericException):
    pass


def parse_keyvals(text: str) -> frozendict:
    """Parse one line (or a blank-separated run) of key=value pairs.
    Stray tokens without '=' are an error rather than silently ignored."""
    text = text.split('#', 1)[0]
    result: Dict[str, str] = {}
    pos = 0
    for m in KEYVAL.finditer(text):
        stray = text[pos:m.start()].strip()
        if stray:
            raise KeyValueSyntaxError(msg=f"Expected key=value, got '{stray}'")
        key = m.group(1)
        if key in result:
            raise KeyValueSyntaxError(msg=f"Key '{key}' given twice")
        result[key] = m.group(2)
        pos = m.end()
    stray = text[pos:].strip()
    if stray:
        raise KeyValueSyntaxError(msg=f"Expected key=value, got '{stray}'")
    return frozendict(result)


def parse_keyval_lines(lines: Iterable[str]) -> frozendict:
    merged: Dict[str, str] = {}
    for line in lines:
        for key, val in parse_keyvals(line).items():
            if key in merged:
                raise KeyValueSyntaxError(msg=f"Key '{key}' given twice")
            merged[key] = val
    return frozendict(merged)


def read_keyval_file(fname: str) -> frozendict:
    return parse_keyval_lines(file_lines(fname))
