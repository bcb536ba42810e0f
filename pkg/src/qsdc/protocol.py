"""Block protocol engine for the two-way link.

One block proceeds through four steps: Bob prepares and sends a slot
sequence of random four-state qubits; Alice diverts a random subset of
the pulses she receives to her check module and discloses the
measurements; Bob estimates the forward error rates and both sides
evaluate the capacity gate; if the link is secure Alice modulates the
remaining slots with codeword chips interleaved with random check
bits, and Bob measures the returning pulses in his preparation bases
and decodes.

Loss accounting follows the effective-detection model: the configured
check channel gives the probability that a slot fires Alice's check
detector, and the data channel gives the probability that a returned
slot fires Bob's detector, both calibrated to the end-to-end budget of
the hardware.  Alice cannot tell which coding slots carry photons, so
chips are assigned to slots blindly and undetected chips become
erasures on Bob's side.

All randomness is drawn from per-block generators derived from
(session seed, block counter), so transcripts are reproducible and
blocks can be simulated in parallel without shared state.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from qsdc.attacks import AttackModel
from qsdc.ldpc import bp_decode, ldpc_encode
from qsdc.security import ErrorRates, SecurityEstimate, eve_information, secrecy_capacity
from qsdc.spreading import ChipFrame, compute_llrs, spread
from qsdc.states import ChannelParams, flip_codes, measure_codes, random_state_codes
from qsdc.wiretap_code import (
    WiretapCode,
    build_code,
    check_security_condition,
    security_budgets,
    uhf_invert,
    uhf_map,
)


class InsufficientPulsesError(RuntimeError):
    """A block did not have enough usable slots; the block is deferred."""


@dataclass(frozen=True)
class CodeParams:
    """Wiretap-code parameters; the code itself is rebuilt on demand."""

    l: int = 1312
    k_u: int = 656
    k_r: int = 128
    n_spread: int = 830
    seed: int = 12345

    def key(self) -> tuple:
        return (self.l, self.k_u, self.k_r, self.n_spread, self.seed)


_code_cache: dict[tuple, WiretapCode] = {}


def realize_code(params: CodeParams) -> WiretapCode:
    """Build (or fetch from the process-wide cache) the configured code."""
    code = _code_cache.get(params.key())
    if code is None:
        code = build_code(params.l, params.k_u, params.k_r, params.n_spread, params.seed)
        if len(_code_cache) >= 8:
            _code_cache.clear()
        _code_cache[params.key()] = code
    return code


@dataclass(frozen=True)
class ProtocolConfig:
    """Session parameters.

    block_pulses is the codeword footprint of one block (it must cover
    n_spread * l chips); the slots actually emitted per block also
    include the interleaved forward check bits and head-room for the
    check pulses Alice consumes.
    """

    code: CodeParams = field(default_factory=CodeParams)
    block_pulses: int = 1_088_960
    check_fraction: float = 0.1
    forward_check_fraction: float = 0.05
    abort_threshold_capacity: float = 0.0
    check_channel: ChannelParams = field(default_factory=lambda: ChannelParams(25.1, 0.008))
    data_channel: ChannelParams = field(default_factory=lambda: ChannelParams(25.1, 0.006))
    g_back_channel_db: float = 4.1
    e_margin: float = 0.03
    enforce_code_budget: bool = False
    confidence_delta: Optional[float] = None
    repetition_rate_hz: float = 1.0e6
    max_block_retries: int = 8

    def __post_init__(self) -> None:
        if self.block_pulses < self.code.n_spread * self.code.l:
            raise ValueError(
                f"block_pulses {self.block_pulses} below chip footprint "
                f"{self.code.n_spread * self.code.l}"
            )
        if not 0.0 < self.check_fraction <= 1.0:
            raise ValueError(f"check_fraction must be in (0, 1], got {self.check_fraction}")
        if not 0.0 <= self.forward_check_fraction < 1.0:
            raise ValueError(
                f"forward_check_fraction must be in [0, 1), got {self.forward_check_fraction}"
            )
        if self.e_margin <= 0.0:
            raise ValueError(f"e_margin must be > 0, got {self.e_margin}")
        if self.g_back_channel_db < 0.0:
            raise ValueError(f"g_back_channel_db must be >= 0, got {self.g_back_channel_db}")
        if self.confidence_delta is not None and not 0.0 < self.confidence_delta < 1.0:
            raise ValueError(f"confidence_delta must be in (0, 1), got {self.confidence_delta}")
        if self.repetition_rate_hz <= 0.0:
            raise ValueError(f"repetition_rate_hz must be > 0, got {self.repetition_rate_hz}")
        if self.max_block_retries < 0:
            raise ValueError(f"max_block_retries must be >= 0, got {self.max_block_retries}")

    @property
    def g(self) -> float:
        """Eve-to-Bob detection advantage implied by the back-channel loss."""
        return 10.0 ** (self.g_back_channel_db / 10.0)

    @property
    def n_forward_checks(self) -> int:
        chips = self.code.n_spread * self.code.l
        return math.ceil(chips * self.forward_check_fraction / (1.0 - self.forward_check_fraction))

    @property
    def slots_per_block(self) -> int:
        """Slots Bob emits per block attempt, with consumption head-room."""
        base = self.block_pulses + self.n_forward_checks
        p_consume = self.check_fraction * self.check_channel.survival
        n = math.ceil(base / (1.0 - p_consume))
        slack = 256 + int(8.0 * math.sqrt(p_consume * n + 1.0))
        return n + slack


def nominal_config() -> ProtocolConfig:
    """The default operating point of the simulated hardware."""
    return ProtocolConfig()


@dataclass(frozen=True)
class CheckDisclosure:
    """Alice's published check measurements: positions, bases, outcomes."""

    positions: np.ndarray
    bases: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self) -> None:
        if not (self.positions.shape == self.bases.shape == self.outcomes.shape):
            raise ValueError("disclosure arrays must have identical shape")
        if self.positions.size > 1 and not (np.diff(self.positions) > 0).all():
            raise ValueError("disclosure positions must be strictly increasing")

    def __len__(self) -> int:
        return int(self.positions.size)


@dataclass(frozen=True)
class CheckStats:
    """Per-basis error estimates from one block's disclosure."""

    e_x: Optional[float]
    e_z: Optional[float]
    n_x: int
    n_z: int
    err_x: int
    err_z: int

    @property
    def well_defined(self) -> bool:
        return self.n_x > 0 and self.n_z > 0


@dataclass(frozen=True)
class GateDecision:
    """Outcome of the capacity gate for one block."""

    proceed: bool
    estimate: SecurityEstimate
    i_ae_half: float
    budget_ok: bool
    budgets: dict
    reason: str


@dataclass(frozen=True)
class EncodeRecord:
    """Public description of one encoded block's slot layout."""

    block_index: int
    consumed_positions: np.ndarray
    fwd_positions: np.ndarray
    fwd_values: np.ndarray
    n_chips: int


@dataclass(frozen=True)
class BlockDecodeResult:
    message_bits: np.ndarray
    random_bits: np.ndarray
    status: str
    e_fwd: Optional[float]
    n_fwd_detected: int
    n_chip_detected: int
    bp_iterations: int
    bp_converged: bool


def bob_prepare_block(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one block of uniformly random preparation states.

    The returned code array doubles as Bob's basis/bit record: basis is
    code >> 1 and bit is code & 1.
    """
    if n <= 0:
        raise ValueError(f"pulse count must be > 0, got {n}")
    return random_state_codes(n, rng)


def alice_sample_check(
    positions: np.ndarray,
    codes: np.ndarray,
    check_fraction: float,
    rng: np.random.Generator,
) -> CheckDisclosure:
    """Select and measure a random subset of the received pulses.

    positions/codes describe the pulses that fired Alice's check path,
    as they arrive at her bench (channel noise already applied).  Each
    is selected independently with check_fraction, measured in a
    uniformly random basis, and disclosed; selected pulses are consumed
    and must not be modulated.
    """
    if not 0.0 < check_fraction <= 1.0:
        raise ValueError(f"check_fraction must be in (0, 1], got {check_fraction}")
    if positions.size == 0:
        raise ValueError("no pulses received in this block (channel outage)")
    sel = rng.random(positions.size) < check_fraction
    pos = positions[sel]
    bases = rng.integers(0, 2, size=int(sel.sum()), dtype=np.uint8)
    outcomes = measure_codes(codes[sel], bases, rng)
    return CheckDisclosure(positions=pos, bases=bases, outcomes=outcomes)


def bob_estimate_errors(disclosure: CheckDisclosure, bob_codes: np.ndarray) -> CheckStats:
    """Compare the disclosure with Bob's records, bucketed by basis.

    Only pulses Alice happened to measure in Bob's preparation basis
    are comparable; a bucket with no such pulses leaves that estimate
    undefined (None).
    """
    prepared = bob_codes[disclosure.positions]
    matched = (prepared >> 1) == disclosure.bases
    errors = disclosure.outcomes != (prepared & 1)
    z_bucket = matched & (disclosure.bases == 0)
    x_bucket = matched & (disclosure.bases == 1)
    n_z = int(z_bucket.sum())
    n_x = int(x_bucket.sum())
    err_z = int((errors & z_bucket).sum())
    err_x = int((errors & x_bucket).sum())
    return CheckStats(
        e_x=err_x / n_x if n_x else None,
        e_z=err_z / n_z if n_z else None,
        n_x=n_x,
        n_z=n_z,
        err_x=err_x,
        err_z=err_z,
    )


def hoeffding_upper(rate: float, n: int, delta: float) -> float:
    """One-sided Hoeffding upper confidence bound on a binomial rate."""
    if n <= 0:
        return 0.5
    return min(0.5, rate + math.sqrt(math.log(1.0 / delta) / (2.0 * n)))


def _capped_rates(e_x: float, e_z: float, e: float) -> ErrorRates:
    # measured rates can exceed the entropy-formula domain under attack;
    # beyond e_x + e_z = 0.5 Eve's information is already maximal, so the
    # pair is scaled back onto the boundary
    s = e_x + e_z
    if s > 0.5:
        scale = 0.5 / s
        e_x *= scale
        e_z *= scale
    return ErrorRates(e_x=min(e_x, 0.5), e_z=min(e_z, 0.5), e=min(e, 0.5))


def gate_on_capacity(
    rates: ErrorRates,
    q_bob: float,
    g: float,
    *,
    threshold: float = 0.0,
    code: Optional[WiretapCode] = None,
    enforce_code_budget: bool = False,
) -> GateDecision:
    """Decide whether the link supports secure transmission.

    The decision compares the closed-form secrecy capacity at the
    operating bias p = 0.5 against the abort threshold.  The wiretap
    code's random-bit budget is evaluated against Eve's bound and
    reported in both per-pulse readings; it only forces an abort when
    enforce_code_budget is set.  Measured rates outside the entropy
    domain (e_x + e_z > 0.5) are scaled onto the boundary where Eve's
    information is already maximal.
    """
    rates = _capped_rates(rates.e_x, rates.e_z, rates.e)
    estimate = secrecy_capacity(rates, q_bob, g)
    i_ae_half = eve_information(min(g * q_bob, 1.0), 0.5, rates)
    if code is not None:
        budget_ok = check_security_condition(code, i_ae_half)
        budgets = security_budgets(code)
    else:
        budget_ok = True
        budgets = {}
    proceed = estimate.c_s_closed_form > threshold
    reason = "capacity above threshold" if proceed else "secrecy capacity at or below threshold"
    if enforce_code_budget and not budget_ok:
        proceed = False
        reason = "random-bit budget below Eve bound"
    return GateDecision(
        proceed=proceed,
        estimate=estimate,
        i_ae_half=i_ae_half,
        budget_ok=budget_ok,
        budgets=budgets,
        reason=reason,
    )


def alice_encode_block(
    message_bits: np.ndarray,
    code: WiretapCode,
    available_positions: np.ndarray,
    forward_check_fraction: float,
    rng: np.random.Generator,
    block_index: int,
) -> tuple[np.ndarray, EncodeRecord]:
    """Modulate one block onto the available slots.

    Fresh random bits are drawn, (message || random) is whitened and
    LDPC encoded, the codeword is spread into chips, and uniformly
    random check bits are interleaved at random slot positions at the
    configured density.  Exactly n_chips + check-bit-count slots are
    consumed, in slot order.  Returns the 0/1 modulation ops aligned
    with the consumed positions and the public layout record.
    """
    message_bits = np.asarray(message_bits, dtype=np.uint8)
    n_chips = code.block_chips
    n_fwd = math.ceil(n_chips * forward_check_fraction / (1.0 - forward_check_fraction)) if forward_check_fraction > 0 else 0
    needed = n_chips + n_fwd
    if available_positions.size < needed:
        raise InsufficientPulsesError(
            f"block needs {needed} slots, only {available_positions.size} available"
        )
    random_bits = rng.integers(0, 2, size=code.k_r, dtype=np.uint8)
    u = uhf_map(message_bits, random_bits, code)
    v = ldpc_encode(u, code.g)
    chips = spread(v, code, block_index)

    consumed = available_positions[:needed]
    ops = np.empty(needed, dtype=np.uint8)
    if n_fwd > 0:
        fwd_local = np.sort(rng.choice(needed, size=n_fwd, replace=False))
        fwd_values = rng.integers(0, 2, size=n_fwd, dtype=np.uint8)
        chip_mask = np.ones(needed, dtype=bool)
        chip_mask[fwd_local] = False
        ops[fwd_local] = fwd_values
        ops[chip_mask] = chips
        fwd_positions = consumed[fwd_local]
    else:
        fwd_values = np.empty(0, dtype=np.uint8)
        fwd_positions = np.empty(0, dtype=np.int64)
        ops[:] = chips
    record = EncodeRecord(
        block_index=block_index,
        consumed_positions=consumed,
        fwd_positions=fwd_positions,
        fwd_values=fwd_values,
        n_chips=n_chips,
    )
    return ops, record


def bob_decode_block(
    detected_positions: np.ndarray,
    outcomes: np.ndarray,
    bob_codes: np.ndarray,
    record: EncodeRecord,
    code: WiretapCode,
    e_margin: float,
) -> BlockDecodeResult:
    """Recover one block from Bob's detected return pulses.

    Measured outcomes are XORed with Bob's prepared bits to estimate
    the modulation op on each detected slot; disclosed forward check
    bits give the running error estimate, the rest are de-spread into
    LLRs and belief-propagation decoded, and the whitening is inverted.
    """
    est = (outcomes ^ (bob_codes[detected_positions] & 1)).astype(np.uint8)
    consumed = record.consumed_positions
    local = np.searchsorted(consumed, detected_positions)
    chip_mask_consumed = np.ones(consumed.size, dtype=bool)
    fwd_local = np.searchsorted(consumed, record.fwd_positions)
    chip_mask_consumed[fwd_local] = False
    chip_index = np.cumsum(chip_mask_consumed) - 1

    det_is_chip = chip_mask_consumed[local]
    chips = np.zeros(code.block_chips, dtype=np.uint8)
    detected = np.zeros(code.block_chips, dtype=bool)
    chips[chip_index[local[det_is_chip]]] = est[det_is_chip]
    detected[chip_index[local[det_is_chip]]] = True

    det_fwd_local = local[~det_is_chip]
    fwd_rank = np.searchsorted(record.fwd_positions, consumed[det_fwd_local])
    n_fwd_det = int(det_fwd_local.size)
    fwd_errors = int((est[~det_is_chip] != record.fwd_values[fwd_rank]).sum())
    e_fwd = fwd_errors / n_fwd_det if n_fwd_det else None
    # Laplace-smoothed estimate keeps the LLR weight finite per block
    e_llr = (fwd_errors + 1.0) / (n_fwd_det + 2.0) if n_fwd_det else 0.1
    e_llr = min(max(e_llr, 1e-4), 0.49)

    frame = ChipFrame(chips=chips, detected=detected)
    llrs = compute_llrs(frame, code, e_llr, record.block_index)
    u_hat, converged, iterations = bp_decode(llrs, code.h, code.info_positions)
    m_hat, r_hat = uhf_invert(u_hat, code)

    if e_fwd is not None and e_fwd > e_margin:
        status = "abort-error-margin"
    elif not converged:
        status = "fail-no-converge"
    else:
        status = "ok"
    return BlockDecodeResult(
        message_bits=m_hat,
        random_bits=r_hat,
        status=status,
        e_fwd=e_fwd,
        n_fwd_detected=n_fwd_det,
        n_chip_detected=int(det_is_chip.sum()),
        bp_iterations=iterations,
        bp_converged=converged,
    )


@dataclass(frozen=True)
class BlockRecord:
    """Scalar per-block-attempt summary kept in the transcript."""

    block_index: int
    attempt: int
    n_sent: int
    n_received_check: int
    n_checked: int
    n_z: int
    n_x: int
    err_z: int
    err_x: int
    e_z: Optional[float]
    e_x: Optional[float]
    q_hat: float
    c_s: Optional[float]
    i_ab: Optional[float]
    i_ae: Optional[float]
    p_star: Optional[float]
    budget_kr: Optional[float]
    budget_ku: Optional[float]
    budget_ok: Optional[bool]
    gate_proceed: Optional[bool]
    status: str
    e_fwd: Optional[float]
    n_fwd_detected: int
    n_chip_detected: int
    bp_iterations: int
    bp_converged: Optional[bool]
    delivered_bits: int


@dataclass
class SessionTranscript:
    """Full account of one session: per-block records plus the outcome."""

    seed: int
    message_length: int
    repetition_rate_hz: float
    blocks: list[BlockRecord] = field(default_factory=list)
    delivered: bytes = b""
    security_abort: bool = False
    abort_reason: Optional[str] = None
    pulses_emitted: int = 0

    @property
    def ok(self) -> bool:
        return not self.security_abort and self.abort_reason is None

    @property
    def throughput_bits_per_s(self) -> float:
        if self.pulses_emitted == 0:
            return 0.0
        return len(self.delivered) * 8 / self.pulses_emitted * self.repetition_rate_hz

    def to_jsonl(self) -> str:
        """One line per block attempt, plus a trailing summary line."""
        lines = [json.dumps({"record": "block", **asdict(b)}) for b in self.blocks]
        lines.append(
            json.dumps(
                {
                    "record": "summary",
                    "seed": self.seed,
                    "message_length": self.message_length,
                    "delivered_bytes": len(self.delivered),
                    "security_abort": self.security_abort,
                    "abort_reason": self.abort_reason,
                    "pulses_emitted": self.pulses_emitted,
                    "throughput_bits_per_s": self.throughput_bits_per_s,
                }
            )
        )
        return "\n".join(lines) + "\n"


def _frame_message(message: bytes, k_m: int) -> list[np.ndarray]:
    """Length-prefix the payload and split it into k_m-bit chunks."""
    header = len(message).to_bytes(4, "big")
    bits = np.unpackbits(np.frombuffer(header + message, dtype=np.uint8))
    n_blocks = math.ceil(bits.size / k_m)
    padded = np.zeros(n_blocks * k_m, dtype=np.uint8)
    padded[: bits.size] = bits
    return [padded[i * k_m : (i + 1) * k_m] for i in range(n_blocks)]


def _unframe_message(bit_chunks: list[np.ndarray]) -> bytes:
    bits = np.concatenate(bit_chunks)
    data = np.packbits(bits).tobytes()
    length = int.from_bytes(data[:4], "big")
    return data[4 : 4 + length]


def _run_block_attempt(
    config: ProtocolConfig,
    code: WiretapCode,
    chunk_bits: np.ndarray,
    seed: int,
    counter: int,
    block_index: int,
    attempt: int,
    attack: AttackModel,
    e_pool: tuple[int, int],
    check_pool: tuple[int, int, int, int] = (0, 0, 0, 0),
) -> tuple[BlockRecord, Optional[BlockDecodeResult]]:
    """Simulate one block attempt end to end; decode result is None when
    the block never reached the encoding step.

    check_pool carries (err_x, n_x, err_z, n_z) accumulated over earlier
    attempts in the session.  The channel and any eavesdropping are
    treated as stationary within a session, so the capacity gate feeds on
    the pooled counts: one block's ~300 disclosed pulses put the nominal
    error rate only about 4 sigma below the abort point, and a session
    of a hundred blocks would flap with non-negligible probability if
    each block were gated on its own sample alone.  Per-block rates are
    still logged unpooled, and the forward-check margin in the decode
    step guards each block individually.
    """
    ss = np.random.SeedSequence([seed, counter])
    bob_rng, channel_rng, alice_rng, attack_rng = (
        np.random.default_rng(child) for child in ss.spawn(4)
    )

    n_sent = config.slots_per_block
    bob_codes = bob_prepare_block(n_sent, bob_rng)
    wire, _ = attack.apply(bob_codes, attack_rng)

    # check path: which slots fire Alice's check detector
    received_mask = channel_rng.random(n_sent) < config.check_channel.survival
    received_pos = np.nonzero(received_mask)[0]
    base_record = dict(
        block_index=block_index,
        attempt=attempt,
        n_sent=n_sent,
        n_received_check=int(received_pos.size),
        n_checked=0,
        n_z=0,
        n_x=0,
        err_z=0,
        err_x=0,
        e_z=None,
        e_x=None,
        q_hat=0.0,
        c_s=None,
        i_ab=None,
        i_ae=None,
        p_star=None,
        budget_kr=None,
        budget_ku=None,
        budget_ok=None,
        gate_proceed=None,
        status="deferred",
        e_fwd=None,
        n_fwd_detected=0,
        n_chip_detected=0,
        bp_iterations=0,
        bp_converged=None,
        delivered_bits=0,
    )
    if received_pos.size == 0:
        return BlockRecord(**base_record), None

    arriving = flip_codes(wire[received_pos], config.check_channel.flip_prob, channel_rng)
    disclosure = alice_sample_check(received_pos, arriving, config.check_fraction, alice_rng)
    stats = bob_estimate_errors(disclosure, bob_codes)
    q_hat = received_pos.size / n_sent
    base_record.update(
        n_checked=len(disclosure),
        n_z=stats.n_z,
        n_x=stats.n_x,
        err_z=stats.err_z,
        err_x=stats.err_x,
        e_z=stats.e_z,
        e_x=stats.e_x,
        q_hat=q_hat,
    )
    if not stats.well_defined:
        return BlockRecord(**base_record), None

    err_pool, n_pool = e_pool
    e_gate = err_pool / n_pool if n_pool else config.data_channel.flip_prob
    px_err, px_n, pz_err, pz_n = check_pool
    gx_err, gx_n = px_err + stats.err_x, px_n + stats.n_x
    gz_err, gz_n = pz_err + stats.err_z, pz_n + stats.n_z
    e_x, e_z = gx_err / gx_n, gz_err / gz_n
    if config.confidence_delta is not None:
        e_x = hoeffding_upper(e_x, gx_n, config.confidence_delta)
        e_z = hoeffding_upper(e_z, gz_n, config.confidence_delta)
        e_gate = hoeffding_upper(e_gate, n_pool, config.confidence_delta)
    rates = _capped_rates(e_x, e_z, e_gate)
    decision = gate_on_capacity(
        rates,
        q_hat,
        config.g,
        threshold=config.abort_threshold_capacity,
        code=code,
        enforce_code_budget=config.enforce_code_budget,
    )
    base_record.update(
        c_s=decision.estimate.c_s_closed_form,
        i_ab=decision.estimate.i_ab,
        i_ae=decision.i_ae_half,
        p_star=decision.estimate.p_star,
        budget_kr=decision.budgets.get("k_r_per_pulse"),
        budget_ku=decision.budgets.get("k_u_per_pulse"),
        budget_ok=decision.budget_ok,
        gate_proceed=decision.proceed,
    )
    if not decision.proceed:
        base_record["status"] = "gate-abort"
        return BlockRecord(**base_record), None

    # encoding phase: no message material leaves Alice before this point
    available = np.setdiff1d(np.arange(n_sent, dtype=np.int64), disclosure.positions)
    try:
        ops, enc_record = alice_encode_block(
            chunk_bits,
            code,
            available,
            config.forward_check_fraction,
            alice_rng,
            block_index=counter,
        )
    except InsufficientPulsesError:
        return BlockRecord(**base_record), None
    returned = wire[enc_record.consumed_positions] ^ ops

    detected_mask = channel_rng.random(returned.size) < config.data_channel.survival
    det_local = np.nonzero(detected_mask)[0]
    det_codes = flip_codes(returned[det_local], config.data_channel.flip_prob, channel_rng)
    det_positions = enc_record.consumed_positions[det_local]
    bob_bases = bob_codes[det_positions] >> 1
    outcomes = measure_codes(det_codes, bob_bases, channel_rng)

    result = bob_decode_block(
        det_positions, outcomes, bob_codes, enc_record, code, config.e_margin
    )
    base_record.update(
        status=result.status,
        e_fwd=result.e_fwd,
        n_fwd_detected=result.n_fwd_detected,
        n_chip_detected=result.n_chip_detected,
        bp_iterations=result.bp_iterations,
        bp_converged=result.bp_converged,
        delivered_bits=code.k_m if result.status == "ok" else 0,
    )
    return BlockRecord(**base_record), result


def run_session(
    config: ProtocolConfig,
    message: bytes,
    seed: int,
    attack: Optional[AttackModel] = None,
) -> SessionTranscript:
    """Send a message end to end, one wiretap-coded block at a time.

    Blocks whose decode fails (error margin exceeded or no
    convergence) are retried with fresh randomness up to
    max_block_retries times; a capacity-gate abort terminates the
    session immediately.  Check counts accumulate across blocks and the
    gate runs on the pooled rates, so the estimate sharpens as the
    session progresses while the first block is still gated on its own
    sample.  The empty message yields an empty transcript.
    """
    attack = attack or AttackModel.none()
    code = realize_code(config.code)
    transcript = SessionTranscript(
        seed=seed,
        message_length=len(message),
        repetition_rate_hz=config.repetition_rate_hz,
    )
    if len(message) == 0:
        return transcript

    chunks = _frame_message(message, code.k_m)
    recovered: list[np.ndarray] = []
    counter = 0
    err_pool, n_pool = 0, 0
    chk_err_x, chk_n_x, chk_err_z, chk_n_z = 0, 0, 0, 0
    for block_index, chunk in enumerate(chunks):
        for attempt in range(config.max_block_retries + 1):
            record, result = _run_block_attempt(
                config,
                code,
                chunk,
                seed,
                counter,
                block_index,
                attempt,
                attack,
                (err_pool, n_pool),
                (chk_err_x, chk_n_x, chk_err_z, chk_n_z),
            )
            counter += 1
            transcript.blocks.append(record)
            transcript.pulses_emitted += record.n_sent
            chk_err_x += record.err_x
            chk_n_x += record.n_x
            chk_err_z += record.err_z
            chk_n_z += record.n_z
            if result is not None and result.n_fwd_detected:
                err_pool += round(result.e_fwd * result.n_fwd_detected)
                n_pool += result.n_fwd_detected
            if record.status == "gate-abort":
                transcript.security_abort = True
                transcript.abort_reason = "capacity-gate"
                return transcript
            if record.status == "ok":
                recovered.append(result.message_bits)
                break
        else:
            transcript.abort_reason = "decode-failure"
            return transcript
    transcript.delivered = _unframe_message(recovered)
    return transcript
