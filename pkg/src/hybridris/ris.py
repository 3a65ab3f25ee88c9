"""RIS reflection construction, energy harvesting, mode switching, and
energy-consumption accounting.

Covers four operating modes:

* passive: phase-dependent reflection amplitude only (no amplification),
* active: uniform amplification gain scaled by harvested energy,
* dynamic hybrid: per-slot passive/active switch on harvested energy vs a
  threshold,
* fixed hybrid: a static subset of elements amplifies at a fixed gain while
  the rest reflect passively.

Harvested energy is collected fresh each slot from a dedicated power beacon;
there is no battery carry-over between slots.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import CMatrix

PASSIVE = "passive"
ACTIVE = "active"
DYNAMIC_HYBRID = "dynamic_hybrid"
FIXED_HYBRID = "fixed_hybrid"


@dataclass(frozen=True)
class PassiveParams:
    """Phase-dependent amplitude model for passive elements.

    beta(eps) = (1 - beta_min) * ((sin(eps - offset_l) + 1) / 2)^exponent
                + beta_min
    """
    beta_min: float = 0.6
    exponent: float = 1.5
    offset_l: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.beta_min <= 1.0:
            raise ValueError("beta_min must lie in [0, 1]")
        if self.exponent < 0 or self.offset_l < 0:
            raise ValueError("exponent and offset_l must be >= 0")


@dataclass(frozen=True)
class ActiveParams:
    """Amplification limits and amplifier noise for active elements.

    E_max is the per-element energy needed to reach alpha_max. amp_noise_var
    is the thermal noise power injected per amplifying element.
    """
    alpha_min: float = 1.2
    alpha_max: float = 2.0
    E_max: float = 9.0
    amp_noise_var: float = 0.01

    def __post_init__(self):
        if not 1.0 < self.alpha_min <= self.alpha_max:
            raise ValueError("need 1 < alpha_min <= alpha_max")
        if self.E_max <= 0 or self.amp_noise_var < 0:
            raise ValueError("E_max must be > 0 and amp_noise_var >= 0")


@dataclass(frozen=True)
class HarvestParams:
    """Beacon harvesting: efficiency eta, beacon power P_PB, phase duration
    T, and the activation threshold tau for the dynamic hybrid mode."""
    eta: float = 0.9
    P_PB: float = 10.0
    T: float = 1.0
    tau: float = 50.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if self.P_PB < 0 or self.T <= 0 or self.tau < 0:
            raise ValueError("P_PB, tau must be >= 0 and T > 0")


@dataclass(frozen=True)
class ConsumptionParams:
    """Control/amplification power draw, converted to joules per slot."""
    P_passive: float = 0.1e-3
    P_amp: float = 50e-3
    P_ctrl: float = 10e-3
    slot_seconds: float = 1.0

    def __post_init__(self):
        if min(self.P_passive, self.P_amp, self.P_ctrl) < 0:
            raise ValueError("powers must be >= 0")
        if self.slot_seconds <= 0:
            raise ValueError("slot_seconds must be > 0")


@dataclass(frozen=True)
class EnergyLedger:
    """Harvested energy per element and in total, for one slot."""
    per_element: np.ndarray
    total: float


@dataclass(frozen=True)
class RisMode:
    """Operating mode; fixed_hybrid carries its element split and gain."""
    kind: str
    active_fraction: float = 0.5
    fixed_gain: float = 2.0

    def __post_init__(self):
        if self.kind not in (PASSIVE, ACTIVE, DYNAMIC_HYBRID, FIXED_HYBRID):
            raise ValueError(f"unknown RIS mode {self.kind!r}")
        if not 0.0 <= self.active_fraction <= 1.0:
            raise ValueError("active_fraction must lie in [0, 1]")
        if self.fixed_gain <= 1.0:
            raise ValueError("fixed_gain must be > 1")

    @classmethod
    def passive(cls):
        return cls(PASSIVE)

    @classmethod
    def active(cls):
        return cls(ACTIVE)

    @classmethod
    def dynamic_hybrid(cls):
        return cls(DYNAMIC_HYBRID)

    @classmethod
    def fixed_hybrid(cls, active_fraction=0.5, fixed_gain=2.0):
        return cls(FIXED_HYBRID, active_fraction, fixed_gain)


@dataclass(frozen=True)
class RisState:
    """Snapshot of the surface for one slot: wrapped phases, the resolved
    passive/active decision, the diagonal reflection matrix, the uniform
    gain in force (1.0 when passive), and the harvest ledger."""
    phases: np.ndarray
    resolved_mode: str
    reflection: CMatrix
    alpha_scaled: float
    ledger: EnergyLedger


def passive_amplitude(eps, p: PassiveParams):
    """Reflection amplitude of a passive element at phase shift ``eps``.

    Result lies in [beta_min, 1]; the minimum is hit where
    sin(eps - offset_l) = -1.
    """
    shaped = ((np.sin(eps - p.offset_l) + 1.0) / 2.0) ** p.exponent
    return (1.0 - p.beta_min) * shaped + p.beta_min


def harvest(h_PB: CMatrix, hp: HarvestParams) -> EnergyLedger:
    """Per-element harvested energy E_r = eta * |h_PB_r|^2 * P_PB * T."""
    per = hp.eta * np.abs(np.asarray(h_PB).ravel()) ** 2 * hp.P_PB * hp.T
    return EnergyLedger(per_element=per, total=float(np.sum(per)))


def energy_gain(ledger: EnergyLedger, R: int, ap: ActiveParams) -> float:
    """Uniform amplification gain scaled by the shared energy budget.

    f = (E_total / R) / E_max; the interpolated gain is hard-clamped at
    alpha_max afterwards, so over-harvest cannot over-amplify.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    f = (ledger.total / R) / ap.E_max
    alpha = ap.alpha_min + (ap.alpha_max - ap.alpha_min) * f
    return float(min(alpha, ap.alpha_max))


def resolve_mode(mode: RisMode, ledger: EnergyLedger, hp: HarvestParams) -> str:
    """Per-slot passive/active decision.

    The dynamic hybrid goes active iff the harvested total reaches tau and
    defaults to passive otherwise; forced modes return themselves, and the
    fixed hybrid always runs its active subset (split applied when the
    reflection matrix is built).
    """
    if mode.kind == DYNAMIC_HYBRID:
        return ACTIVE if ledger.total >= hp.tau else PASSIVE
    if mode.kind == FIXED_HYBRID:
        return ACTIVE
    return mode.kind


def wrap_phase(eps):
    """Wrap onto [0, 2*pi)."""
    return np.mod(eps, 2.0 * np.pi)


def build_reflection(phases, resolved: str, pp: PassiveParams,
                     ap: ActiveParams, alpha: float, mode: RisMode) -> CMatrix:
    """Diagonal reflection matrix for the resolved mode.

    Passive: diag(beta(eps_r) e^{j eps_r}). Active: uniform gain alpha on
    every element. Fixed hybrid: the first floor(active_fraction * R)
    elements amplify at the fixed gain, the rest reflect passively. Phases
    outside [0, 2*pi) are wrapped, never rejected.
    """
    eps = wrap_phase(np.asarray(phases, dtype=float).ravel())
    R = eps.size
    unit = np.exp(1j * eps)
    if mode.kind == FIXED_HYBRID:
        n_active = int(np.floor(mode.active_fraction * R))
        mag = passive_amplitude(eps, pp)
        mag[:n_active] = mode.fixed_gain
        diag = mag * unit
    elif resolved == ACTIVE:
        if not ap.alpha_min <= alpha <= ap.alpha_max:
            raise ValueError("active gain outside [alpha_min, alpha_max]")
        diag = alpha * unit
    else:
        diag = passive_amplitude(eps, pp) * unit
    return np.diag(diag).astype(np.complex128)


def energy_consumed(resolved: str, alpha: float, R: int,
                    cp: ConsumptionParams) -> float:
    """Energy drawn by the surface in one slot (joules).

    Passive elements cost control power only; active elements add power
    proportional to the amplification gain.
    """
    if resolved == ACTIVE:
        power = R * (alpha * cp.P_amp + cp.P_ctrl)
    else:
        power = R * cp.P_passive
    return float(power * cp.slot_seconds)


def fixed_hybrid_energy(mode: RisMode, R: int, cp: ConsumptionParams) -> float:
    """Slot energy for the fixed hybrid split: the amplifying subset is
    billed at its fixed gain, the remainder at passive control power."""
    n_active = int(np.floor(mode.active_fraction * R))
    e = 0.0
    if n_active:
        e += energy_consumed(ACTIVE, mode.fixed_gain, n_active, cp)
    if R - n_active:
        e += energy_consumed(PASSIVE, 1.0, R - n_active, cp)
    return e
