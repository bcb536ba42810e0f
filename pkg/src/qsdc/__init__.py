"""Toolkit for simulating and analysing two-way quantum secure direct communication.

The package covers the full stack of a ping-pong style QSDC link: the
four-state qubit and lossy-channel model, wiretap security analysis,
the spread-spectrum LDPC coding chain, the block protocol engine, and
attack/experiment harnesses with a command line front end.
"""

from qsdc.states import (
    Basis,
    ChannelParams,
    EncodeOp,
    PreparedQubit,
    QubitState,
    apply_encoding,
    measure,
    prepare_random,
    transmit,
)
from qsdc.security import (
    AttackOverlaps,
    ErrorRates,
    RateParams,
    SecurityEstimate,
    binary_entropy,
    entropy_rho_abe,
    eve_information,
    gram_eigenvalues,
    gram_matrix,
    main_information,
    optimal_attack_overlaps,
    secrecy_capacity,
    xi,
)
from qsdc.wiretap_code import (
    WiretapCode,
    build_code,
    check_security_condition,
    uhf_invert,
    uhf_map,
)
from qsdc.spreading import compute_llrs, keystream, spread
from qsdc.ldpc import bp_decode, ldpc_encode
from qsdc.protocol import (
    CodeParams,
    ProtocolConfig,
    SessionTranscript,
    nominal_config,
    run_session,
)
from qsdc.attacks import AttackModel

__all__ = [
    "Basis",
    "ChannelParams",
    "EncodeOp",
    "PreparedQubit",
    "QubitState",
    "apply_encoding",
    "measure",
    "prepare_random",
    "transmit",
    "AttackOverlaps",
    "ErrorRates",
    "RateParams",
    "SecurityEstimate",
    "binary_entropy",
    "entropy_rho_abe",
    "eve_information",
    "gram_eigenvalues",
    "gram_matrix",
    "main_information",
    "optimal_attack_overlaps",
    "secrecy_capacity",
    "xi",
    "WiretapCode",
    "build_code",
    "check_security_condition",
    "uhf_invert",
    "uhf_map",
    "compute_llrs",
    "keystream",
    "spread",
    "bp_decode",
    "ldpc_encode",
    "CodeParams",
    "ProtocolConfig",
    "SessionTranscript",
    "nominal_config",
    "run_session",
    "AttackModel",
]
