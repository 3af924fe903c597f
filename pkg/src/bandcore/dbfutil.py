import os
from os.path import abspath, dirname
import tempfile


def file_lines(fname, trim=False):
    return list(each_file_line(fname, trim))


def each_file_line(fname, trim=False):
    with open(fname, "rb") as f:
        for line in f:
            line = line.decode('utf8')
            if trim:
                line = line.strip()
            yield line


def atomic_write(fname, text):
    """Write text to fname via a temp file in the same directory followed
    by a rename, so readers never see a half-written file."""
    directory = dirname(abspath(fname))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, fname)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class SimpleClass(object):
    """Record whose fields are the keyword arguments of the constructor."""

    def __init__(self, **args):
        for arg, val in args.items():
            self.__dict__[arg] = val


class GenericException(Exception):
    def __init__(self, msg=None):
        self.msg = msg

    def __str__(self):
        return str(self.msg)
