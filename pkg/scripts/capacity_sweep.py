#!/usr/bin/env python3
"""Reproduce the information-rate-versus-loss curves as a CSV table.

Sweeps the system loss at the nominal error rates and prints the
analytic rates; the region where c_s > 0 is the secure operating area.

    python3 scripts/capacity_sweep.py --loss-start 5 --loss-stop 35 --loss-step 0.5
"""

import sys

from qsdc.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", *sys.argv[1:]]))
