#!/usr/bin/env python3
"""Run a multi-block session at the nominal operating point and tabulate
the per-block error estimates (the steady-band stability picture).

    python3 scripts/stability_run.py --blocks 50 --seed 1 --output stability.csv
"""

import sys

from qsdc.cli import main

if __name__ == "__main__":
    sys.exit(main(["stability", *sys.argv[1:]]))
