"""Cascaded-Rayleigh channel sampling for one network topology.

Link coefficients are products of independent unit-power complex Gaussian
factors (Rayleigh magnitude, uniform phase). The product of ``kappa``
factors keeps E[|xi|^2] = 1 at every cascade level, so sweeps over the
cascade level compare fading shape rather than mean power. No large-scale
path loss is applied.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import CMatrix, sample_cn01


@dataclass(frozen=True)
class Topology:
    """Antenna/user counts: A transmit antennas, B SU receivers, R RIS
    elements, W PU receivers."""
    A: int = 2
    B: int = 2
    R: int = 4
    W: int = 2

    def __post_init__(self):
        for name in ("A", "B", "R", "W"):
            if getattr(self, name) < 1:
                raise ValueError(f"Topology.{name} must be >= 1")


@dataclass(frozen=True)
class CascadeSpec:
    """Cascade level per link family (number of multiplicative factors)."""
    kappa_s: int = 4   # SU transmitter -> RIS
    kappa_b: int = 4   # RIS -> SU receivers
    kappa_p: int = 1   # SU transmitter -> PU receivers

    def __post_init__(self):
        for name in ("kappa_s", "kappa_b", "kappa_p"):
            k = getattr(self, name)
            if int(k) != k or k < 1:
                raise ValueError(f"CascadeSpec.{name} must be an integer >= 1")


@dataclass(frozen=True)
class FadingMode:
    """Block fading: one independent realization per ``block_length`` steps."""
    block_length: int = 1

    def __post_init__(self):
        if self.block_length < 1:
            raise ValueError("block_length must be >= 1")


@dataclass(frozen=True)
class ChannelSet:
    """One time slot of channel realizations.

    H_s:  R x A, SU transmitter to RIS
    h_b:  list of B vectors (R x 1), RIS to each SU receiver
    H_p:  A x W, SU transmitter to PU receivers
    h_PB: R x 1, power beacon to RIS (plain Rayleigh)
    g_sp: W per-PU power gains, squared norm of the matching H_p column
    """
    H_s: CMatrix
    h_b: list
    H_p: CMatrix
    h_PB: CMatrix
    g_sp: np.ndarray = field(default=None)

    def tobytes(self) -> bytes:
        parts = [self.H_s.tobytes(), self.H_p.tobytes(), self.h_PB.tobytes()]
        parts += [h.tobytes() for h in self.h_b]
        parts.append(np.asarray(self.g_sp).tobytes())
        return b"".join(parts)


def sample_cascaded(rng: np.random.Generator, kappa: int, size=None):
    """Product of ``kappa`` independent unit-power complex Gaussian factors.

    E[|xi|^2] = 1 for every kappa; the tails get heavier as kappa grows
    (var(|xi|^2) = 2^kappa - 1).
    """
    if kappa < 1:
        raise ValueError("cascade level must be >= 1")
    shape = (kappa,) if size is None else (kappa,) + tuple(np.atleast_1d(size))
    factors = sample_cn01(rng, shape)
    out = np.prod(factors, axis=0)
    return complex(out) if size is None else out


def pu_power_gains(H_p: CMatrix) -> np.ndarray:
    """Per-PU channel power gain: squared Euclidean norm of each column,
    i.e. the total gain from all transmit antennas to that PU."""
    return np.sum(np.abs(H_p) ** 2, axis=0)


def sample_channel_set(rng: np.random.Generator, topo: Topology,
                       spec: CascadeSpec) -> ChannelSet:
    """Draw all channels for one time slot.

    The beacon link is plain Rayleigh (cascade level 1); everything else
    uses the configured cascade levels. Entries are drawn in a fixed order
    (H_s, each h_b, H_p, h_PB), so a fixed seed reproduces the set
    byte-for-byte.
    """
    H_s = sample_cascaded(rng, spec.kappa_s, (topo.R, topo.A))
    h_b = [sample_cascaded(rng, spec.kappa_b, (topo.R, 1)) for _ in range(topo.B)]
    H_p = sample_cascaded(rng, spec.kappa_p, (topo.A, topo.W))
    h_PB = sample_cascaded(rng, 1, (topo.R, 1))
    return ChannelSet(H_s=H_s, h_b=h_b, H_p=H_p, h_PB=h_PB,
                      g_sp=pu_power_gains(H_p))
