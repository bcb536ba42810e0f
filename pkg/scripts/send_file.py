#!/usr/bin/env python3
"""Transmit a file through the simulated link and report throughput.

    python3 scripts/send_file.py --input photo.png --output recovered.png --seed 7
    python3 scripts/send_file.py --input msg.txt --output out.txt \
        --attack intercept-resend --attack-fraction 1.0
"""

import sys

from qsdc.cli import main

if __name__ == "__main__":
    sys.exit(main(["send", *sys.argv[1:]]))
