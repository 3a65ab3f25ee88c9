"""SINR, per-user rates, sum rates, and the PU interference power cap.

Data symbols are assumed i.i.d. unit power, so the transmit power of a
beamformer G is tr(G G^H) and never needs per-symbol waveforms. All powers
are linear watts internally; dB-valued config inputs are converted at
config-load time.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .numerics import CMatrix, hermitian, trace


@dataclass(frozen=True)
class NoiseParams:
    """Receiver noise variance per mode (watts)."""
    sigma_b_sq: float = 1.0   # passive-mode receiver noise
    sigma_a_sq: float = 1.0   # active-mode receiver noise

    def __post_init__(self):
        if self.sigma_b_sq <= 0 or self.sigma_a_sq <= 0:
            raise ValueError("noise variances must be > 0")


@dataclass(frozen=True)
class PowerConstraint:
    """Max SU transmit power and the PU interference ceiling (linear W)."""
    P_t: float = 10.0
    I_thr: float = 10.0

    def __post_init__(self):
        if self.P_t <= 0 or self.I_thr <= 0:
            raise ValueError("P_t and I_thr must be > 0")


@dataclass(frozen=True)
class RateReport:
    per_user_sinr: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: float


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


def power_cap(pc: PowerConstraint, g_sp) -> float:
    """Transmit power ceiling: min of the power budget and the interference
    threshold divided by the strongest PU link. Zero PU gain leaves only
    the power budget."""
    g_max = float(np.max(np.asarray(g_sp))) if len(np.atleast_1d(g_sp)) else 0.0
    if g_max <= 0.0:
        return pc.P_t
    return min(pc.P_t, pc.I_thr / g_max)


def project_beamformer(G: CMatrix, cap: float) -> CMatrix:
    """Scale G down (never up) so tr(G G^H) <= cap.

    Feasible inputs pass through unchanged; infeasible ones are rescaled by
    sqrt(cap / power), which preserves the beam directions.
    """
    if cap <= 0:
        raise ValueError("cap must be > 0")
    power = float(np.real(trace(matmul_gram(G))))
    if power <= cap:
        return G
    return G * np.sqrt(cap / power)


def matmul_gram(G: CMatrix) -> CMatrix:
    return np.asarray(G) @ hermitian(G)


def _effective_rows(ch: ChannelSet, refl: CMatrix, b: int):
    """h_b^T * reflection (1 x R) and its product with H_s (1 x A)."""
    hrow = ch.h_b[b].ravel()[None, :] @ refl
    return hrow, hrow @ ch.H_s


def sinr_passive(ch: ChannelSet, refl: CMatrix, G: CMatrix,
                 noise: NoiseParams, b: int) -> float:
    """SINR at SU receiver b through a passive reflection matrix.

    Interference is the co-channel leakage from beams intended for the
    other receivers.
    """
    _, eff = _effective_rows(ch, refl, b)
    v = (eff @ G).ravel()
    powers = np.abs(v) ** 2
    signal = powers[b]
    interf = float(np.sum(powers) - signal)
    return float(signal / (interf + noise.sigma_b_sq))


def sinr_active(ch: ChannelSet, refl: CMatrix, G: CMatrix,
                noise: NoiseParams, amp_noise_var: float, b: int,
                amp_mask=None) -> float:
    """SINR at SU receiver b with an amplifying reflection matrix.

    Adds the thermal noise re-radiated by the amplifiers,
    amp_noise_var * ||h_b^T Psi||^2, restricted to the amplifying elements
    when ``amp_mask`` is given (mixed fixed-hybrid surfaces); passive
    elements carry no amplifier.
    """
    hrow, eff = _effective_rows(ch, refl, b)
    v = (eff @ G).ravel()
    powers = np.abs(v) ** 2
    signal = powers[b]
    interf = float(np.sum(powers) - signal)
    amp_terms = np.abs(hrow.ravel()) ** 2
    if amp_mask is not None:
        amp_terms = amp_terms[np.asarray(amp_mask, dtype=bool)]
    amp_noise = amp_noise_var * float(np.sum(amp_terms))
    return float(signal / (interf + amp_noise + noise.sigma_a_sq))


def rate_report(sinrs) -> RateReport:
    """Per-user rates log2(1 + sinr) and their sum."""
    lam = np.asarray(sinrs, dtype=float)
    if np.any(lam < 0):
        raise ValueError("SINR values must be >= 0")
    rates = np.log2(1.0 + lam)
    return RateReport(per_user_sinr=lam, per_user_rate=rates,
                      sum_rate=float(np.sum(rates)))
