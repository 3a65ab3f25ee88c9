"""Non-episodic MDP around the hybrid-RIS link.

Each step: harvest beacon energy, resolve the surface mode, decode the
agent's beamformer/phase action under the PU interference cap, score the
resulting sum rate, and charge the energy-shortfall penalty when the
surface amplifies without enough harvest. Runs have no terminal state; a
"run" is simply a fixed number of steps.

Observation layout (flat float64 vector, length 2 + 2RA + 2RB + 2AW + 2AB
+ R + 2):

    [0]                 P_t, configured max transmit power (linear W)
    [1]                 I_thr, PU interference threshold (linear W)
    [2 : 2+2RA]         H_s, real parts row-major then imaginary parts
    [.. : ..+2RB]       for each receiver b: Re(h_b) then Im(h_b)
    [.. : ..+2AW]       H_p, real parts row-major then imaginary parts
    [.. : ..+2AB]       previous beamformer G, real then imaginary parts
    [.. : ..+R]         previous phase shifts (wrapped radians)
    [-2]                previous uniform gain (1.0 on passive slots)
    [-1]                previous resolved-mode flag (1 active, 0 passive)

The channels in an observation are the ones the next action will be scored
against; the previous-action fields are zeroed right after a reset.

Action layout (flat vector, length 2AB + R, agent range [-1, 1] per entry):
the first AB entries are beamformer real parts (row-major), the next AB the
imaginary parts, and the last R entries map linearly onto phases via
eps = (x + 1) * pi.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import phy, ris
from .channel import (CascadeSpec, ChannelSet, FadingMode, Topology,
                      sample_channel_set)
from .numerics import make_rng, restore_rng, rng_state
from .phy import NoiseParams, PowerConstraint
from .ris import (ACTIVE, FIXED_HYBRID, ActiveParams, ConsumptionParams,
                  HarvestParams, PassiveParams, RisMode)

CONSTRAINT_TOL = 1e-9


@dataclass(frozen=True)
class EnvConfig:
    topo: Topology = field(default_factory=Topology)
    cascade: CascadeSpec = field(default_factory=CascadeSpec)
    pp: PassiveParams = field(default_factory=PassiveParams)
    ap: ActiveParams = field(default_factory=ActiveParams)
    hp: HarvestParams = field(default_factory=HarvestParams)
    cp: ConsumptionParams = field(default_factory=ConsumptionParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    pc: PowerConstraint = field(default_factory=PowerConstraint)
    mode: RisMode = field(default_factory=RisMode.dynamic_hybrid)
    penalty_weight: float = 0.1
    fading: FadingMode = field(default_factory=FadingMode)
    seed: int = 0

    def __post_init__(self):
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be >= 0")

    def with_(self, **kwargs) -> "EnvConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class StepOutcome:
    observation: np.ndarray
    reward: float
    info: dict


def observation_size(topo: Topology) -> int:
    return (2 + 2 * topo.R * topo.A + 2 * topo.R * topo.B
            + 2 * topo.A * topo.W + 2 * topo.A * topo.B + topo.R + 2)


def action_size(topo: Topology) -> int:
    return 2 * topo.A * topo.B + topo.R


def decode_action(a, cap: float, topo: Topology):
    """Split a flat action into a cap-feasible beamformer and wrapped phases.

    The beamformer block is taken as raw complex entries and projected down
    to the power cap; out-of-range inputs are tolerated because projection
    enforces feasibility regardless.
    """
    a = np.asarray(a, dtype=float).ravel()
    ab = topo.A * topo.B
    if a.size != 2 * ab + topo.R:
        raise ValueError(f"action length {a.size}, expected {2 * ab + topo.R}")
    re = a[:ab].reshape(topo.A, topo.B)
    im = a[ab:2 * ab].reshape(topo.A, topo.B)
    G = phy.project_beamformer(re + 1j * im, cap)
    phases = ris.wrap_phase((a[2 * ab:] + 1.0) * np.pi)
    return G, phases


class RisCrnEnv:
    """Single-owner environment; run many instances (one per seed) for
    parallel experiments."""

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        self._rng = None
        self._channels = None
        self._t = 0
        self._violations = 0
        self._prev_G = None
        self._prev_phases = None
        self._prev_alpha = 0.0
        self._prev_mode_flag = 0.0

    @property
    def observation_size(self) -> int:
        return observation_size(self.cfg.topo)

    @property
    def action_size(self) -> int:
        return action_size(self.cfg.topo)

    @property
    def violations(self) -> int:
        """Steps on which the projected beamformer exceeded the cap."""
        return self._violations

    def reset(self, seed=None) -> np.ndarray:
        seed = self.cfg.seed if seed is None else seed
        self._rng = make_rng(seed)
        self._channels = sample_channel_set(self._rng, self.cfg.topo,
                                            self.cfg.cascade)
        self._t = 0
        self._violations = 0
        topo = self.cfg.topo
        self._prev_G = np.zeros((topo.A, topo.B), dtype=np.complex128)
        self._prev_phases = np.zeros(topo.R)
        self._prev_alpha = 0.0
        self._prev_mode_flag = 0.0
        return self._observe()

    def step(self, action) -> StepOutcome:
        if self._channels is None:
            raise RuntimeError("call reset() before step()")
        cfg = self.cfg
        topo = cfg.topo
        ch = self._channels

        ledger = ris.harvest(ch.h_PB, cfg.hp)
        resolved = ris.resolve_mode(cfg.mode, ledger, cfg.hp)
        cap = phy.power_cap(cfg.pc, ch.g_sp)
        G, phases = decode_action(action, cap, topo)

        if cfg.mode.kind == FIXED_HYBRID:
            alpha = cfg.mode.fixed_gain
        elif resolved == ACTIVE:
            alpha = ris.energy_gain(ledger, topo.R, cfg.ap)
        else:
            alpha = 1.0
        refl = ris.build_reflection(phases, resolved, cfg.pp, cfg.ap,
                                    alpha, cfg.mode)

        if resolved == ACTIVE:
            mask = None
            if cfg.mode.kind == FIXED_HYBRID:
                mask = np.zeros(topo.R, dtype=bool)
                mask[:int(np.floor(cfg.mode.active_fraction * topo.R))] = True
            sinrs = [phy.sinr_active(ch, refl, G, cfg.noise,
                                     cfg.ap.amp_noise_var, b, amp_mask=mask)
                     for b in range(topo.B)]
        else:
            sinrs = [phy.sinr_passive(ch, refl, G, cfg.noise, b)
                     for b in range(topo.B)]
        report = phy.rate_report(sinrs)

        if resolved == ACTIVE:
            penalty = cfg.penalty_weight * max(0.0, cfg.hp.tau - ledger.total)
        else:
            penalty = 0.0
        reward = report.sum_rate - penalty

        if cfg.mode.kind == FIXED_HYBRID:
            energy = ris.fixed_hybrid_energy(cfg.mode, topo.R, cfg.cp)
        else:
            energy = ris.energy_consumed(resolved, alpha, topo.R, cfg.cp)

        tx_power = float(np.real(phy.trace(phy.matmul_gram(G))))
        if tx_power > cap + CONSTRAINT_TOL:
            self._violations += 1

        self._prev_G = G
        self._prev_phases = phases
        self._prev_alpha = alpha
        self._prev_mode_flag = 1.0 if resolved == ACTIVE else 0.0
        self._t += 1
        if self._t % cfg.fading.block_length == 0:
            self._channels = sample_channel_set(self._rng, topo, cfg.cascade)

        info = {
            "sum_rate": report.sum_rate,
            "resolved_mode": resolved,
            "E_total": ledger.total,
            "alpha": alpha,
            "energy_consumed": energy,
            "cap": cap,
            "penalty": penalty,
        }
        return StepOutcome(observation=self._observe(), reward=reward,
                           info=info)

    def get_state(self) -> dict:
        """Snapshot for exact run continuation (channels, RNG position,
        previous-action fields, counters)."""
        ch = self._channels
        return {
            "rng": rng_state(self._rng),
            "channels": None if ch is None else {
                "H_s": ch.H_s.copy(),
                "h_b": [h.copy() for h in ch.h_b],
                "H_p": ch.H_p.copy(),
                "h_PB": ch.h_PB.copy(),
                "g_sp": np.asarray(ch.g_sp).copy(),
            },
            "t": self._t,
            "violations": self._violations,
            "prev_G": self._prev_G.copy(),
            "prev_phases": self._prev_phases.copy(),
            "prev_alpha": self._prev_alpha,
            "prev_mode_flag": self._prev_mode_flag,
        }

    def set_state(self, st: dict):
        self._rng = restore_rng(st["rng"])
        chd = st["channels"]
        self._channels = None if chd is None else ChannelSet(
            H_s=chd["H_s"], h_b=list(chd["h_b"]), H_p=chd["H_p"],
            h_PB=chd["h_PB"], g_sp=chd["g_sp"])
        self._t = int(st["t"])
        self._violations = int(st["violations"])
        self._prev_G = st["prev_G"]
        self._prev_phases = st["prev_phases"]
        self._prev_alpha = float(st["prev_alpha"])
        self._prev_mode_flag = float(st["prev_mode_flag"])

    def _observe(self) -> np.ndarray:
        ch = self._channels
        parts = [
            np.array([self.cfg.pc.P_t, self.cfg.pc.I_thr]),
            np.real(ch.H_s).ravel(), np.imag(ch.H_s).ravel(),
        ]
        for h in ch.h_b:
            parts += [np.real(h).ravel(), np.imag(h).ravel()]
        parts += [
            np.real(ch.H_p).ravel(), np.imag(ch.H_p).ravel(),
            np.real(self._prev_G).ravel(), np.imag(self._prev_G).ravel(),
            self._prev_phases,
            np.array([self._prev_alpha, self._prev_mode_flag]),
        ]
        return np.concatenate(parts)


def step_log_record(t: int, outcome: StepOutcome) -> dict:
    """One step-log entry; schema is fixed for the experiment harness."""
    info = outcome.info
    return {
        "t": t,
        "reward": outcome.reward,
        "sum_rate": info["sum_rate"],
        "mode": info["resolved_mode"],
        "E_total": info["E_total"],
        "alpha": info["alpha"],
        "energy_J": info["energy_consumed"],
        "cap": info["cap"],
    }
