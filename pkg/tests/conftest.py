import numpy as np
import pytest

from qsdc.protocol import CodeParams, ProtocolConfig
from qsdc.states import ChannelParams
from qsdc.wiretap_code import build_code


@pytest.fixture(scope="session")
def default_code():
    # nominal operating-point code: 830 chips/bit against ~25 dB loss
    return build_code(1312, 656, 128, 830, seed=12345)


@pytest.fixture(scope="session")
def small_code():
    return build_code(256, 128, 32, 8, seed=99)


@pytest.fixture(scope="session")
def toy_code():
    # small enough for exhaustive ML over all 2^4 codewords
    return build_code(8, 4, 1, 4, seed=7)


@pytest.fixture(scope="session")
def fast_config():
    """Low-loss small-code config: whole sessions run in milliseconds.

    5 dB survival keeps the mean detections per codeword bit near the
    nominal design point (8 x 0.316 = 2.5).  The check path is
    noiseless and the margin is loose because the tiny per-block check
    samples here would otherwise make gate decisions flap; measured
    error statistics at nominal scale are covered by the acceptance
    suite.
    """
    return ProtocolConfig(
        code=CodeParams(l=256, k_u=128, k_r=32, n_spread=8, seed=99),
        block_pulses=8 * 256,
        check_channel=ChannelParams(5.0, 0.0),
        data_channel=ChannelParams(5.0, 0.006),
        e_margin=0.12,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
