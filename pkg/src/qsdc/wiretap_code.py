"""Wiretap code: universal-hash preprocessing over a spread LDPC code.

A block carries k_u information bits: k_m secret message bits plus
k_r fresh uniform bits whose rate pays for the information an
eavesdropper can hold.  The information word is whitened by an
invertible random binary matrix (a universal hash family member fixed
by the code seed), LDPC encoded to l coded bits, and spread by
n_spread chips per bit.  The receiver inverts the chain after
belief-propagation decoding.

Everything is reconstructible from (l, k_u, k_r, n_spread, seed); the
exported description carries those plus matrix checksums so two
parties can verify they built the same code.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass

import numpy as np

from qsdc.gf2 import gf2_matmul, random_invertible
from qsdc.ldpc import peg_construct, systematic_generator

VAR_DEGREE = 3
MAX_BUILD_ATTEMPTS = 16


@dataclass(frozen=True, eq=False)
class WiretapCode:
    """All public material of one code instance."""

    l: int
    k_u: int
    k_r: int
    n_spread: int
    seed: int
    h: np.ndarray
    g: np.ndarray
    info_positions: np.ndarray
    uhf: np.ndarray
    uhf_inv: np.ndarray

    @property
    def k_m(self) -> int:
        return self.k_u - self.k_r

    @property
    def block_chips(self) -> int:
        return self.n_spread * self.l


def build_code(l: int, k_u: int, k_r: int, n_spread: int, seed: int) -> WiretapCode:
    """Construct the code deterministically from its parameters.

    The parity-check matrix is redrawn with a derived seed when the
    Gauss-Jordan reduction finds it rank deficient, up to
    MAX_BUILD_ATTEMPTS times.
    """
    if not 0 < k_r < k_u < l:
        raise ValueError(f"need 0 < k_r < k_u < l, got k_r={k_r}, k_u={k_u}, l={l}")
    if n_spread < 1:
        raise ValueError(f"n_spread must be >= 1, got {n_spread}")
    m = l - k_u
    if VAR_DEGREE > m:
        raise ValueError(f"l - k_u = {m} is below the variable degree {VAR_DEGREE}")

    h = g = info = None
    for attempt in range(MAX_BUILD_ATTEMPTS):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0, attempt]))
        h_try = peg_construct(m, l, VAR_DEGREE, rng)
        try:
            g, info = systematic_generator(h_try)
        except ValueError:
            continue
        h = h_try
        break
    if h is None:
        raise RuntimeError(
            f"no full-rank parity-check matrix in {MAX_BUILD_ATTEMPTS} attempts"
        )

    uhf_rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    uhf, uhf_inv = random_invertible(k_u, uhf_rng)
    return WiretapCode(
        l=l,
        k_u=k_u,
        k_r=k_r,
        n_spread=n_spread,
        seed=seed,
        h=h,
        g=g,
        info_positions=info,
        uhf=uhf,
        uhf_inv=uhf_inv,
    )


def uhf_map(message_bits: np.ndarray, random_bits: np.ndarray, code: WiretapCode) -> np.ndarray:
    """Whiten (message || random) into the information word u = M (m||r)."""
    m = np.asarray(message_bits, dtype=np.uint8)
    r = np.asarray(random_bits, dtype=np.uint8)
    if m.shape != (code.k_m,):
        raise ValueError(f"message length {m.shape} != ({code.k_m},)")
    if r.shape != (code.k_r,):
        raise ValueError(f"random-bit length {r.shape} != ({code.k_r},)")
    x = np.concatenate([m, r])
    return gf2_matmul(code.uhf, x[:, None])[:, 0]


def uhf_invert(u: np.ndarray, code: WiretapCode) -> tuple[np.ndarray, np.ndarray]:
    """Recover (message, random bits) from an information word."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (code.k_u,):
        raise ValueError(f"information-word length {u.shape} != ({code.k_u},)")
    x = gf2_matmul(code.uhf_inv, u[:, None])[:, 0]
    return x[: code.k_m], x[code.k_m :]


def check_security_condition(code: WiretapCode, i_ae: float) -> bool:
    """True iff the per-pulse random-bit budget covers Eve's information.

    The budget is k_r / (n_spread * l) bits per pulse; the condition
    holds when i_ae does not exceed it.
    """
    if i_ae < 0.0:
        raise ValueError(f"i_ae must be >= 0, got {i_ae}")
    return i_ae <= code.k_r / code.block_chips


def security_budgets(code: WiretapCode) -> dict[str, float]:
    """Both per-pulse budget readings: sacrificial bits and total information bits."""
    return {
        "k_r_per_pulse": code.k_r / code.block_chips,
        "k_u_per_pulse": code.k_u / code.block_chips,
    }


def _checksum(arr: np.ndarray) -> str:
    return hashlib.sha256(np.packbits(arr.astype(np.uint8)).tobytes()).hexdigest()


def code_description(code: WiretapCode) -> str:
    """Serialise the code parameters plus matrix checksums."""
    cp = configparser.ConfigParser()
    cp["wiretap-code"] = {
        "l": str(code.l),
        "k_u": str(code.k_u),
        "k_r": str(code.k_r),
        "n_spread": str(code.n_spread),
        "seed": str(code.seed),
        "h_sha256": _checksum(code.h),
        "g_sha256": _checksum(code.g),
        "uhf_sha256": _checksum(code.uhf),
    }
    out = io.StringIO()
    cp.write(out)
    return out.getvalue()


def code_from_description(text: str) -> WiretapCode:
    """Rebuild a code from its description, verifying the checksums."""
    cp = configparser.ConfigParser()
    cp.read_string(text)
    if "wiretap-code" not in cp:
        raise ValueError("missing [wiretap-code] section")
    sec = cp["wiretap-code"]
    code = build_code(
        l=int(sec["l"]),
        k_u=int(sec["k_u"]),
        k_r=int(sec["k_r"]),
        n_spread=int(sec["n_spread"]),
        seed=int(sec["seed"]),
    )
    for name, arr in (("h", code.h), ("g", code.g), ("uhf", code.uhf)):
        want = sec.get(f"{name}_sha256")
        if want is not None and want != _checksum(arr):
            raise ValueError(f"checksum mismatch for {name}: rebuilt code differs")
    return code
