import numpy as np
import pytest

from hybridris.channel import (CascadeSpec, Topology, pu_power_gains,
                               sample_cascaded, sample_channel_set)
from hybridris.numerics import make_rng
from oracles import naive_column_gains


class ScriptedRng:
    """Duck-typed generator returning pre-set standard_normal blocks."""

    def __init__(self, blocks):
        self.blocks = [np.asarray(b, dtype=float) for b in blocks]

    def standard_normal(self, size=None):
        return self.blocks.pop(0)


def test_cascaded_rejects_zero_level():
    with pytest.raises(ValueError):
        sample_cascaded(make_rng(0), 0)


@pytest.mark.parametrize("kappa,band", [(1, 0.03), (4, 0.15)])
def test_cascaded_unit_power(kappa, band):
    xi = sample_cascaded(make_rng(100 + kappa), kappa, 100_000)
    assert np.mean(np.abs(xi) ** 2) == pytest.approx(1.0, abs=band)


@pytest.mark.parametrize("kappa", [1, 2, 4])
def test_cascaded_mean_within_three_stderr(kappa):
    n = 100_000
    xi = sample_cascaded(make_rng(200 + kappa), kappa, n)
    power = np.abs(xi) ** 2
    stderr = np.sqrt((2.0 ** kappa - 1.0) / n)
    assert abs(np.mean(power) - 1.0) <= 3.0 * stderr


def test_cascaded_phase_addition():
    # two factors forced to unit magnitude with phases pi/2 and pi;
    # sample_cn01 draws all real parts first, then all imaginary parts
    s = np.sqrt(2.0)
    rng = ScriptedRng([[0.0, -s], [s, 0.0]])
    xi = sample_cascaded(rng, 2)
    assert xi == pytest.approx(np.exp(1j * 3 * np.pi / 2))


def test_channel_set_shapes():
    topo = Topology(A=2, B=2, R=4, W=2)
    ch = sample_channel_set(make_rng(1), topo, CascadeSpec())
    assert ch.H_s.shape == (4, 2)
    assert len(ch.h_b) == 2 and all(h.shape == (4, 1) for h in ch.h_b)
    assert ch.H_p.shape == (2, 2)
    assert ch.h_PB.shape == (4, 1)
    assert ch.g_sp.shape == (2,)


def test_gains_zero_column():
    assert pu_power_gains(np.zeros((3, 1), dtype=complex)).tolist() == [0.0]


def test_gains_match_scalar_loop():
    ch = sample_channel_set(make_rng(2), Topology(), CascadeSpec())
    expected = naive_column_gains(ch.H_p)
    assert np.allclose(ch.g_sp, expected, atol=1e-12)
    assert np.all(ch.g_sp >= 0)


def test_gains_invariant_under_column_phase():
    ch = sample_channel_set(make_rng(3), Topology(), CascadeSpec())
    rotated = ch.H_p.copy()
    rotated[:, 0] *= np.exp(1j * 0.7)
    assert np.allclose(pu_power_gains(rotated), ch.g_sp, atol=1e-12)


def test_fixed_seed_bitwise_identical():
    topo = Topology(A=2, B=3, R=5, W=2)
    spec = CascadeSpec(kappa_s=2, kappa_b=3, kappa_p=1)
    a = sample_channel_set(make_rng(42), topo, spec)
    b = sample_channel_set(make_rng(42), topo, spec)
    assert a.tobytes() == b.tobytes()


def test_cascade_spec_validation():
    with pytest.raises(ValueError):
        CascadeSpec(kappa_s=0)
    with pytest.raises(ValueError):
        Topology(A=0)
