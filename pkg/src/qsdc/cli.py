"""Command line front end.

Subcommands:
  capacity   single-point secrecy capacity evaluation
  sweep      analytic information rates across a loss range (CSV)
  stability  per-block error-rate table over a simulated session (CSV)
  send       transmit a file through the simulated protocol

Exit codes: 0 success, 2 I/O or argument error, 3 security abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from qsdc.attacks import AttackModel
from qsdc.config_io import load_config
from qsdc.experiments import (
    SweepSpec,
    run_capacity_sweep,
    run_e2e,
    run_stability,
    sweep_to_csv,
)
from qsdc.protocol import ProtocolConfig, nominal_config
from qsdc.security import ErrorRates, eve_information, main_information, secrecy_capacity

EXIT_OK = 0
EXIT_IO = 2
EXIT_SECURITY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsdc",
        description="Simulator and security calculator for a two-way QSDC link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cap = sub.add_parser("capacity", help="single-point secrecy capacity")
    group = cap.add_mutually_exclusive_group()
    group.add_argument("--q-bob", type=float, default=None, help="Bob detection rate per pulse")
    group.add_argument("--loss-db", type=float, default=None, help="system loss in dB")
    cap.add_argument("--e", type=float, default=0.006, help="data-path error rate")
    cap.add_argument("--e-x", type=float, default=0.008, help="X-basis check error rate")
    cap.add_argument("--e-z", type=float, default=0.008, help="Z-basis check error rate")
    cap.add_argument("--g", type=float, default=10.0 ** (4.1 / 10.0), help="Eve detection advantage")

    sw = sub.add_parser("sweep", help="capacity sweep over loss range, CSV output")
    sw.add_argument("--loss-start", type=float, default=5.0)
    sw.add_argument("--loss-stop", type=float, default=35.0)
    sw.add_argument("--loss-step", type=float, default=0.5)
    sw.add_argument("--e", type=float, default=0.006)
    sw.add_argument("--e-x", type=float, default=0.008)
    sw.add_argument("--e-z", type=float, default=0.008)
    sw.add_argument("--g", type=float, default=10.0 ** (4.1 / 10.0))
    sw.add_argument("--output", default="-", help="CSV path, or - for stdout")

    st = sub.add_parser("stability", help="per-block error table over a session")
    st.add_argument("--config", default=None, help="INI config path")
    st.add_argument("--blocks", type=int, default=50)
    st.add_argument("--seed", type=int, default=1)
    st.add_argument("--output", default="-", help="CSV path, or - for stdout")

    snd = sub.add_parser("send", help="transmit a file through the simulated link")
    snd.add_argument("--config", default=None, help="INI config path")
    snd.add_argument("--input", required=True, help="payload file")
    snd.add_argument("--output", required=True, help="recovered-file path")
    snd.add_argument("--seed", type=int, default=1)
    snd.add_argument(
        "--attack",
        choices=["none", "intercept-resend", "collective"],
        default="none",
    )
    snd.add_argument("--attack-fraction", type=float, default=1.0)
    snd.add_argument("--attack-ex", type=float, default=0.0)
    snd.add_argument("--attack-ez", type=float, default=0.0)
    snd.add_argument("--report", default=None, help="write the JSON report here as well")
    snd.add_argument("--transcript", default=None, help="write per-block JSONL here")
    return parser


def _load_config_arg(path: str | None) -> ProtocolConfig:
    if path is None:
        return nominal_config()
    return load_config(path)


def _attack_from_args(args: argparse.Namespace) -> AttackModel:
    if args.attack == "none":
        return AttackModel.none()
    if args.attack == "intercept-resend":
        return AttackModel.intercept_resend(args.attack_fraction)
    return AttackModel.optimal_collective(args.attack_ex, args.attack_ez)


def _cmd_capacity(args: argparse.Namespace) -> int:
    if args.q_bob is not None:
        q_bob = args.q_bob
    elif args.loss_db is not None:
        q_bob = 10.0 ** (-args.loss_db / 10.0)
    else:
        q_bob = 10.0 ** (-25.1 / 10.0)
    rates = ErrorRates(e_x=args.e_x, e_z=args.e_z, e=args.e)
    est = secrecy_capacity(rates, q_bob, args.g)
    i_ae_half = eve_information(min(args.g * q_bob, 1.0), 0.5, rates)
    i_ab_half = main_information(q_bob, 0.5, args.e)
    print(f"q_bob {q_bob:.6e}")
    print(f"g {args.g:.6f}")
    print(f"i_ab {i_ab_half:.6e}")
    print(f"i_ae {i_ae_half:.6e}")
    print(f"c_s {est.c_s_closed_form:.6e}")
    print(f"c_s_grid {est.c_s:.6e}")
    print(f"p_star {est.p_star:.6f}")
    print(f"secure {'yes' if est.c_s_closed_form > 0 else 'no'}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec(
        loss_start_db=args.loss_start,
        loss_stop_db=args.loss_stop,
        loss_step_db=args.loss_step,
        e=args.e,
        e_x=args.e_x,
        e_z=args.e_z,
        g=args.g,
    )
    csv = sweep_to_csv(run_capacity_sweep(spec))
    if args.output == "-":
        sys.stdout.write(csv)
    else:
        Path(args.output).write_text(csv)
    return EXIT_OK


_STABILITY_COLUMNS = ("block", "attempt", "e_x", "e_z", "e", "n_x", "n_z", "n_fwd", "c_s", "status")


def _cmd_stability(args: argparse.Namespace) -> int:
    config = _load_config_arg(args.config)
    report = run_stability(config, args.blocks, args.seed)
    lines = [",".join(_STABILITY_COLUMNS)]
    for row in report.rows:
        cells = []
        for col in _STABILITY_COLUMNS:
            value = row[col]
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(f"{value:.8e}")
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    csv = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(csv)
    else:
        Path(args.output).write_text(csv)
    for key, value in report.summary.items():
        print(f"{key} {value}", file=sys.stderr)
    if report.summary["security_abort"]:
        return EXIT_SECURITY
    return EXIT_OK


def _cmd_send(args: argparse.Namespace) -> int:
    config = _load_config_arg(args.config)
    attack = _attack_from_args(args)
    report = run_e2e(
        config,
        args.input,
        args.output,
        args.seed,
        attack=attack,
        transcript_path=args.transcript,
    )
    text = json.dumps(report, indent=2)
    print(text)
    if args.report is not None:
        Path(args.report).write_text(text + "\n")
    if report["security_abort"]:
        return EXIT_SECURITY
    if report["abort_reason"] is not None:
        return EXIT_SECURITY
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "capacity": _cmd_capacity,
        "sweep": _cmd_sweep,
        "stability": _cmd_stability,
        "send": _cmd_send,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
