#!/usr/bin/env python

"""
Command line for the topoband toolkit, e.g.

    tbcl.py invariant chern --model qahe2d --m 1 --grid 24 --json out.json
    tbcl.py classify entry --class AII --dim 3
    tbcl.py classify table
    tbcl.py edge count --model qahe2d --m 1 --width 30
    tbcl.py phase-diagram --model qahe2d --masses=-3,-1,1,3

Set LOG_LEVEL=DEBUG for the details of grid sweeps.
"""

import logging.config
import sys

from bandcore.logging import no_datetime_config
from topoband.cli import run


if __name__ == "__main__":
    logging.config.dictConfig(no_datetime_config)
    sys.exit(run(sys.argv[1:]))
