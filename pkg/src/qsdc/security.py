"""Wiretap security analysis for the two-way four-state protocol.

Everything here is per-pulse and in bits (base-2 logs throughout).
Eve is granted a collective attack on the forward path, purified so
that her accessible information is bounded by the entropy of the joint
state; the bound reduces to closed forms in the check error rates
(e_x, e_z) measured on the forward path, the message error rate e seen
by Bob, and the detection-rate asymmetry g between Eve and Bob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar


@dataclass(frozen=True)
class ErrorRates:
    """Check-phase error rates per basis and the message-phase rate.

    e_x, e_z come from Alice's disclosed check measurements on the
    forward path; e is the rate Bob sees on decoded message chips.
    """

    e_x: float
    e_z: float
    e: float

    def __post_init__(self) -> None:
        for name in ("e_x", "e_z", "e"):
            v = getattr(self, name)
            if not 0.0 <= v <= 0.5:
                raise ValueError(f"{name} must be in [0, 0.5], got {v}")


@dataclass(frozen=True)
class RateParams:
    """Detection rates: Bob's receipt probability and Eve's advantage g.

    g is the ratio of Eve's accessible detection rate to Bob's; for a
    back-channel loss of L dB it equals 10^(L/10) since Eve can tap
    right at Alice's output.  p is the probability that Alice applies
    the identity (encodes 0); the hardware runs at p = 0.5.
    """

    q_bob: float
    g: float
    p: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.q_bob <= 1.0:
            raise ValueError(f"q_bob must be in (0, 1], got {self.q_bob}")
        if self.g < 1.0:
            raise ValueError(f"g must be >= 1, got {self.g}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if self.q_eve > 1.0:
            raise ValueError(f"q_eve = g*q_bob = {self.q_eve} exceeds 1")

    @property
    def q_eve(self) -> float:
        return self.g * self.q_bob


@dataclass(frozen=True)
class SecurityEstimate:
    """Result of the capacity optimisation over the encoding bias p."""

    i_ab: float
    i_ae: float
    c_s: float
    p_star: float
    c_s_closed_form: float


@dataclass(frozen=True)
class AttackOverlaps:
    """Reduced description of a collective attack on the forward path.

    alpha and beta are the imaginary parts of the ancilla overlaps that
    correlate Eve with the undisturbed states; delta_mag is the modulus
    of the cross-overlap difference.  Only the two combinations
    delta1 = |alpha - beta| and delta2 = sqrt((alpha+beta)^2 + delta^2)
    enter the joint-state spectrum.
    """

    alpha: float
    beta: float
    delta_mag: float

    def __post_init__(self) -> None:
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError(
                f"overlap magnitudes must be >= 0, got alpha={self.alpha}, beta={self.beta}"
            )
        if self.delta_mag < 0.0:
            raise ValueError(f"delta_mag must be >= 0, got {self.delta_mag}")
        if self.delta1 + self.delta2 > 1.0 + 1e-12:
            raise ValueError(
                "delta1 + delta2 must not exceed 1 "
                f"(got {self.delta1 + self.delta2}); the Gram spectrum would "
                "leave [0, 1]"
            )

    @property
    def delta1(self) -> float:
        return abs(self.alpha - self.beta)

    @property
    def delta2(self) -> float:
        return math.sqrt((self.alpha + self.beta) ** 2 + self.delta_mag**2)


def binary_entropy(x: float) -> float:
    """Shannon entropy of a coin with bias x, in bits."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy argument must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def xi(p: float, e_x: float, e_z: float) -> float:
    """Effective bias of Eve's optimal measurement on her ancilla.

    xi = (1 - sqrt((1-2p)^2 + (1-2e_x-2e_z)^2 (1 - (1-2p)^2))) / 2

    At p = 0.5 the radical collapses to |1 - 2(e_x+e_z)| and xi equals
    e_x + e_z; that case is evaluated directly so the cancellation is
    exact in floating point at the hardware operating point.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    s = e_x + e_z
    if e_x < 0.0 or e_z < 0.0 or s > 0.5:
        raise ValueError(f"need e_x, e_z >= 0 and e_x + e_z <= 0.5, got {e_x}, {e_z}")
    if p == 0.5:
        return s
    a = (1.0 - 2.0 * p) ** 2
    d = 1.0 - 2.0 * s
    radicand = a + d * d * (1.0 - a)
    return (1.0 - math.sqrt(radicand)) / 2.0


def eve_information(q_eve: float, p: float, rates: ErrorRates) -> float:
    """Upper bound on Eve's information per pulse, q_eve * h(xi)."""
    if not 0.0 <= q_eve <= 1.0:
        raise ValueError(f"q_eve must be in [0, 1], got {q_eve}")
    return q_eve * binary_entropy(xi(p, rates.e_x, rates.e_z))

def main_information(q_bob: float, p: float, e: float) -> float:
    """Alice-to-Bob mutual information per pulse.

    Bob sees Alice's bit through a BSC(e); with encoding bias p the
    output bias is p + e - 2pe, so I = q_bob * (h(p + e - 2pe) - h(e)).
    """
    if not 0.0 <= q_bob <= 1.0:
        raise ValueError(f"q_bob must be in [0, 1], got {q_bob}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if not 0.0 <= e <= 0.5:
        raise ValueError(f"e must be in [0, 0.5], got {e}")
    mixed = p + e - 2.0 * p * e
    return q_bob * (binary_entropy(mixed) - binary_entropy(e))


def secrecy_capacity(
    rates: ErrorRates, q_bob: float, g: float, grid_points: int = 501
) -> SecurityEstimate:
    """Maximise I(A:B) - I(A:E) over the encoding bias p.

    A uniform grid over [0, 1] (odd-sized, so p = 0.5 is on the grid)
    seeds a bounded local refinement.  The closed form
    q_bob * (1 - h(e) - g*h(e_x+e_z)), which is the p = 0.5 value of
    the objective, is recorded alongside; a negative value is returned
    as-is so callers can log the margin to abort.

    Returns
    -------
    SecurityEstimate with i_ab, i_ae evaluated at the maximiser p_star,
    c_s = i_ab - i_ae, and the closed form.
    """
    if grid_points < 3 or grid_points % 2 == 0:
        raise ValueError("grid_points must be odd and >= 3")
    # Eve's detection rate saturates at one pulse per pulse in the
    # low-loss regime
    q_eve = min(g * q_bob, 1.0)
    closed = q_bob * (
        1.0
        - binary_entropy(rates.e)
        - g * binary_entropy(min(rates.e_x + rates.e_z, 0.5))
    )

    def objective(p: float) -> float:
        return main_information(q_bob, p, rates.e) - eve_information(q_eve, p, rates)

    grid = np.linspace(0.0, 1.0, grid_points)
    values = np.array([objective(p) for p in grid])
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid_points - 1)]
    result = minimize_scalar(lambda p: -objective(p), bounds=(lo, hi), method="bounded")
    p_star = float(result.x)
    if -result.fun < values[best]:
        p_star = float(grid[best])
    i_ab = main_information(q_bob, p_star, rates.e)
    i_ae = eve_information(q_eve, p_star, rates)
    return SecurityEstimate(
        i_ab=i_ab,
        i_ae=i_ae,
        c_s=i_ab - i_ae,
        p_star=p_star,
        c_s_closed_form=closed,
    )


def gram_matrix(p: float, ov: AttackOverlaps) -> np.ndarray:
    """Gram matrix of the purified joint state of one encoded pulse.

    The 4x4 Hermitian matrix has trace 1; its spectrum determines the
    entropy available to Eve.  delta_mag enters as a real overlap since
    its phase does not affect the spectrum.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    c = math.sqrt(p * (1.0 - p))
    a = ov.alpha
    b = ov.beta
    d = ov.delta_mag
    gm = np.array(
        [
            [p, 0.0, 2.0j * a * c, c * d],
            [0.0, p, -c * d, -2.0j * b * c],
            [-2.0j * a * c, -c * d, 1.0 - p, 0.0],
            [c * d, 2.0j * b * c, 0.0, 1.0 - p],
        ],
        dtype=complex,
    )
    return gm / 2.0


def gram_eigenvalues(p: float, ov: AttackOverlaps) -> np.ndarray:
    """Closed-form spectrum of gram_matrix, descending.

    lambda = 1/4 +- (1/2) sqrt(p(1-p)(delta1 +- delta2)^2 + (p - 1/2)^2)
    over the four sign choices.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    offset = (p - 0.5) ** 2
    pq = p * (1.0 - p)
    eigs = []
    for s_outer in (1.0, -1.0):
        for s_inner in (1.0, -1.0):
            root = math.sqrt(pq * (ov.delta1 + s_inner * ov.delta2) ** 2 + offset)
            eigs.append(0.25 + s_outer * 0.5 * root)
    return np.sort(np.array(eigs))[::-1]


def entropy_rho_abe(p: float, rates: ErrorRates) -> float:
    """Entropy of the joint state under the optimal attack, 1 + h(xi).

    This is the maximum of -sum(lambda log2 lambda) over all overlaps
    consistent with the observed (e_x, e_z), attained at delta1 = 0 and
    delta2 = 1 - 2e_x - 2e_z.
    """
    return 1.0 + binary_entropy(xi(p, rates.e_x, rates.e_z))


def optimal_attack_overlaps(rates: ErrorRates) -> AttackOverlaps:
    """Overlaps of the entropy-maximising attack for given check rates.

    Zero ancilla asymmetry (alpha = beta = 0) and a cross overlap whose
    modulus is |1 - 2e_x - 2e_z| saturate the entropy bound.
    """
    s = rates.e_x + rates.e_z
    if s > 0.5:
        raise ValueError(f"e_x + e_z must be <= 0.5, got {s}")
    return AttackOverlaps(alpha=0.0, beta=0.0, delta_mag=abs(1.0 - 2.0 * s))
