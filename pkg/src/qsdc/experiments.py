"""Experiment harnesses: stability runs, capacity sweeps, file transfer.

Each harness returns plain rows (lists of dicts) plus a summary dict so
the command line layer can render them as delimited text without any
knowledge of the underlying protocol objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from qsdc.attacks import AttackKind, AttackModel
from qsdc.protocol import ProtocolConfig, SessionTranscript, realize_code, run_session
from qsdc.security import ErrorRates, binary_entropy, eve_information, main_information


def _mean_std(values: list[float]) -> tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0


@dataclass(frozen=True)
class StabilityReport:
    rows: list[dict]
    summary: dict
    transcript: SessionTranscript


def run_stability(config: ProtocolConfig, n_blocks: int, seed: int) -> StabilityReport:
    """Run n_blocks consecutive protocol blocks and tabulate the
    per-block error estimates.

    A synthetic payload sized to exactly n_blocks codeword blocks is
    transmitted; each block attempt contributes one row of
    (e_x, e_z, e) where e is the forward check error seen on the data
    path.  The summary reports per-column means and standard
    deviations plus the pooled counts behind them.
    """
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    code = realize_code(config.code)
    payload_bytes = (n_blocks * code.k_m - 32) // 8
    if payload_bytes < 1:
        raise ValueError("code too small to fit the framing header in one block")
    payload = np.random.default_rng(seed).integers(0, 256, payload_bytes, dtype=np.uint8).tobytes()
    transcript = run_session(config, payload, seed)

    rows = []
    for b in transcript.blocks:
        rows.append(
            {
                "block": b.block_index,
                "attempt": b.attempt,
                "e_x": b.e_x,
                "e_z": b.e_z,
                "e": b.e_fwd,
                "n_x": b.n_x,
                "n_z": b.n_z,
                "n_fwd": b.n_fwd_detected,
                "c_s": b.c_s,
                "status": b.status,
            }
        )
    ex_vals = [r["e_x"] for r in rows if r["e_x"] is not None]
    ez_vals = [r["e_z"] for r in rows if r["e_z"] is not None]
    e_vals = [r["e"] for r in rows if r["e"] is not None]
    mean_ex, std_ex = _mean_std(ex_vals)
    mean_ez, std_ez = _mean_std(ez_vals)
    mean_e, std_e = _mean_std(e_vals)
    summary = {
        "n_rows": len(rows),
        "n_blocks_requested": n_blocks,
        "mean_e_x": mean_ex,
        "std_e_x": std_ex,
        "mean_e_z": mean_ez,
        "std_e_z": std_ez,
        "mean_e": mean_e,
        "std_e": std_e,
        "n_x_total": sum(r["n_x"] for r in rows),
        "n_z_total": sum(r["n_z"] for r in rows),
        "n_fwd_total": sum(r["n_fwd"] for r in rows),
        "security_abort": transcript.security_abort,
        "abort_reason": transcript.abort_reason,
        "delivered_ok": transcript.delivered == payload,
    }
    return StabilityReport(rows=rows, summary=summary, transcript=transcript)


@dataclass(frozen=True)
class SweepSpec:
    """Loss range and fixed channel parameters for a capacity sweep."""

    loss_start_db: float
    loss_stop_db: float
    loss_step_db: float
    e: float = 0.006
    e_x: float = 0.008
    e_z: float = 0.008
    g: float = 10.0 ** (4.1 / 10.0)

    def __post_init__(self) -> None:
        if self.loss_step_db <= 0:
            raise ValueError(f"loss_step_db must be > 0, got {self.loss_step_db}")
        if self.loss_stop_db < self.loss_start_db:
            raise ValueError("loss range is empty")

    def losses(self) -> np.ndarray:
        n = int(math.floor((self.loss_stop_db - self.loss_start_db) / self.loss_step_db + 1e-9)) + 1
        return self.loss_start_db + self.loss_step_db * np.arange(n)


SWEEP_HEADER = ("loss_db", "q_bob", "i_ab", "i_ae", "c_s")


def run_capacity_sweep(spec: SweepSpec) -> list[dict]:
    """Evaluate the analytic information rates across a loss range.

    Deterministic: every row is the closed-form evaluation at the
    operating bias p = 0.5 with Q^Bob = 10^(-loss/10).
    """
    rates = ErrorRates(e_x=spec.e_x, e_z=spec.e_z, e=spec.e)
    rows = []
    for loss_db in spec.losses():
        q_bob = 10.0 ** (-loss_db / 10.0)
        q_eve = min(spec.g * q_bob, 1.0)
        i_ab = main_information(q_bob, 0.5, spec.e)
        i_ae = eve_information(q_eve, 0.5, rates)
        c_s = q_bob * (
            1.0 - binary_entropy(spec.e) - spec.g * binary_entropy(min(spec.e_x + spec.e_z, 0.5))
        )
        rows.append(
            {
                "loss_db": float(loss_db),
                "q_bob": q_bob,
                "i_ab": i_ab,
                "i_ae": i_ae,
                "c_s": c_s,
            }
        )
    return rows


def sweep_to_csv(rows: list[dict]) -> str:
    lines = [",".join(SWEEP_HEADER)]
    for r in rows:
        lines.append(
            "%.6f,%.10e,%.10e,%.10e,%.10e" % tuple(r[k] for k in SWEEP_HEADER)
        )
    return "\n".join(lines) + "\n"


def run_e2e(
    config: ProtocolConfig,
    input_path: str | Path,
    output_path: str | Path,
    seed: int,
    attack: Optional[AttackModel] = None,
    transcript_path: Optional[str | Path] = None,
) -> dict:
    """Transmit a file through the full protocol and report throughput.

    The recovered bytes are written to output_path (only when the
    session completes).  The report carries the measured rate next to
    the two theoretical conversions, which do not agree with each
    other: the block-accounting rate k_m / slots-per-block and the
    capacity-based rate C_s x repetition rate.  Under a collective
    attack the report also carries the analytic bound on Eve's
    information (her optimal measurement is not simulable; the bound
    is the quantity the security statement uses).
    """
    attack = attack or AttackModel.none()
    data = Path(input_path).read_bytes()
    transcript = run_session(config, data, seed, attack=attack)
    code = realize_code(config.code)

    retries = sum(1 for b in transcript.blocks if b.attempt > 0)
    report = {
        "bytes_in": len(data),
        "bytes_out": len(transcript.delivered),
        "byte_identical": transcript.delivered == data,
        "blocks": len(transcript.blocks),
        "retries": retries,
        "pulses_emitted": transcript.pulses_emitted,
        "security_abort": transcript.security_abort,
        "abort_reason": transcript.abort_reason,
        "throughput_bits_per_s": transcript.throughput_bits_per_s,
        "block_rate_bits_per_s": code.k_m / config.slots_per_block * config.repetition_rate_hz,
        "capacity_rate_bits_per_s": _nominal_capacity(config) * config.repetition_rate_hz,
        "attack": attack.kind.value,
    }
    if transcript.security_abort or transcript.abort_reason:
        aborted = transcript.blocks[-1]
        report["abort_block"] = aborted.block_index
        report["abort_cause"] = transcript.abort_reason
    if attack.kind is AttackKind.OPTIMAL_COLLECTIVE:
        # analytic ledger for Eve: the bound at her target disturbance
        rates = ErrorRates(
            e_x=attack.e_x_target, e_z=attack.e_z_target, e=config.data_channel.flip_prob
        )
        q_bob = config.data_channel.survival
        report["eve_bound_bits_per_pulse"] = eve_information(
            min(config.g * q_bob, 1.0), 0.5, rates
        )
    if not transcript.security_abort and transcript.abort_reason is None:
        Path(output_path).write_bytes(transcript.delivered)
        report["output_path"] = str(output_path)
    if transcript_path is not None:
        Path(transcript_path).write_text(transcript.to_jsonl())
    return report


def _nominal_capacity(config: ProtocolConfig) -> float:
    rates = ErrorRates(
        e_x=config.check_channel.flip_prob,
        e_z=config.check_channel.flip_prob,
        e=config.data_channel.flip_prob,
    )
    q_bob = config.data_channel.survival
    return q_bob * (
        1.0
        - binary_entropy(rates.e)
        - config.g * binary_entropy(min(rates.e_x + rates.e_z, 0.5))
    )
