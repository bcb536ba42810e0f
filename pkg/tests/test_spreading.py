"""Keystream generation, chip spreading, de-spreading into LLRs."""

import math

import numpy as np
import pytest

from qsdc.spreading import ChipFrame, compute_llrs, keystream, lfsr_state, spread

_LAGS = (10, 30, 31, 32)
_DEGREE = 32


def _naive_stream(state: int, length: int) -> np.ndarray:
    # independent oracle: direct bit-by-bit shift register
    bits = [(state >> i) & 1 for i in range(_DEGREE)]
    out = []
    for _ in range(length):
        out.append(bits[0])
        new = 0
        for lag in _LAGS:
            new ^= bits[_DEGREE - lag]
        bits = bits[1:] + [new]
    return np.array(out, dtype=np.uint8)


def test_keystream_matches_naive_register():
    for seed, block in [(1, 0), (42, 3), (12345, 7), (7, 100)]:
        state = lfsr_state(seed, block)
        assert (keystream(seed, block, 400) == _naive_stream(state, 400)).all()


def test_keystream_satisfies_recurrence():
    ks = keystream(9, 2, 20000)
    k = np.arange(_DEGREE, ks.size)
    expected = np.zeros(k.size, dtype=np.uint8)
    for lag in _LAGS:
        expected ^= ks[k - lag]
    assert (ks[k] == expected).all()


def test_keystream_prefix_consistency():
    long = keystream(3, 5, 5000)
    short = keystream(3, 5, 1200)
    assert (long[:1200] == short).all()


def test_keystream_blocks_differ():
    a = keystream(12345, 0, 4096)
    b = keystream(12345, 1, 4096)
    c = keystream(54321, 0, 4096)
    assert (a != b).any() and (a != c).any()
    # distinct phases of the same m-sequence decorrelate quickly
    assert 0.35 < (a ^ b).mean() < 0.65


def test_keystream_deterministic():
    assert (keystream(11, 4, 999) == keystream(11, 4, 999)).all()


def test_lfsr_state_nonzero():
    for seed in range(50):
        for block in range(4):
            assert lfsr_state(seed, block) != 0


def test_keystream_balance_at_operating_size():
    # chip windows aligned with codeword bits must stay balanced, else
    # a hit-or-miss detector would see biased chips
    ks = keystream(12345, 0, 830 * 1312)
    slices = ks.reshape(1312, 830).mean(axis=1)
    assert abs(ks.mean() - 0.5) < 0.005
    assert ((slices >= 0.45) & (slices <= 0.55)).mean() >= 0.99
    assert (np.abs(slices - 0.5) < 0.10).all()


def test_spread_xors_repeated_codeword(small_code, rng):
    v = rng.integers(0, 2, small_code.l, dtype=np.uint8)
    chips = spread(v, small_code, 3)
    ks = keystream(small_code.seed, 3, small_code.block_chips)
    assert (chips == (ks ^ np.repeat(v, small_code.n_spread))).all()


def test_spread_rejects_bad_shape(small_code, rng):
    with pytest.raises(ValueError):
        spread(np.zeros(small_code.l + 1, dtype=np.uint8), small_code, 0)


def test_chip_frame_shape_validation():
    with pytest.raises(ValueError):
        ChipFrame(chips=np.zeros(8, dtype=np.uint8), detected=np.zeros(7, dtype=bool))


def test_compute_llrs_clean_full_detection(small_code, rng):
    v = rng.integers(0, 2, small_code.l, dtype=np.uint8)
    chips = spread(v, small_code, 5)
    frame = ChipFrame(chips=chips, detected=np.ones(chips.size, dtype=bool))
    e = 0.01
    llrs = compute_llrs(frame, small_code, e, 5)
    unit = math.log((1 - e) / e)
    expected = small_code.n_spread * unit * (1.0 - 2.0 * v.astype(float))
    assert np.allclose(llrs, expected, atol=1e-12)


def test_compute_llrs_no_detection_is_exactly_zero(small_code):
    frame = ChipFrame(
        chips=np.zeros(small_code.block_chips, dtype=np.uint8),
        detected=np.zeros(small_code.block_chips, dtype=bool),
    )
    llrs = compute_llrs(frame, small_code, 0.01, 0)
    assert (llrs == 0.0).all()


def test_compute_llrs_vote_counting(small_code, rng):
    # flipping one detected chip moves that bit's LLR by two vote units
    v = np.zeros(small_code.l, dtype=np.uint8)
    chips = spread(v, small_code, 2)
    detected = np.ones(chips.size, dtype=bool)
    e = 0.05
    base = compute_llrs(ChipFrame(chips=chips, detected=detected), small_code, e, 2)
    chips2 = chips.copy()
    chips2[0] ^= 1
    moved = compute_llrs(ChipFrame(chips=chips2, detected=detected), small_code, e, 2)
    unit = math.log((1 - e) / e)
    assert moved[0] == pytest.approx(base[0] - 2 * unit)
    assert np.allclose(moved[1:], base[1:])


def test_compute_llrs_rejects_degenerate_error_rate(small_code):
    frame = ChipFrame(
        chips=np.zeros(small_code.block_chips, dtype=np.uint8),
        detected=np.ones(small_code.block_chips, dtype=bool),
    )
    for bad in (0.0, 0.5, 0.7, -0.1):
        with pytest.raises(ValueError):
            compute_llrs(frame, small_code, bad, 0)
