import numpy as np
import pytest

from hybridris.nets import Adam, DenseNet, soft_update
from hybridris.numerics import make_rng
from oracles import fd_param_gradients, naive_dense_forward


def test_identity_layer_passes_through():
    net = DenseNet([3, 3], make_rng(0))
    net.params[0][...] = np.eye(3)
    net.params[1][...] = 0.0
    x = np.array([0.5, -1.0, 2.0])
    assert np.allclose(net.forward(x)[0], x)


def test_zero_weights_output_bias():
    net = DenseNet([4, 2], make_rng(1))
    net.params[0][...] = 0.0
    net.params[1][...] = np.array([3.0, -1.5])
    out = net.forward(np.ones((5, 4)))
    assert np.allclose(out, [3.0, -1.5])


def test_forward_matches_scalar_loop():
    rng = make_rng(2)
    net = DenseNet([4, 8, 2], rng)
    x = rng.standard_normal(4)
    expected = naive_dense_forward(net.sizes, net.params, x)
    assert np.max(np.abs(net.forward(x)[0] - expected)) < 1e-12


def test_forward_shape_check():
    net = DenseNet([4, 2], make_rng(3))
    with pytest.raises(ValueError):
        net.forward(np.ones(5))


def test_linear_regression_gradient_closed_form():
    # single linear unit, squared loss on one sample
    net = DenseNet([1, 1], make_rng(4))
    w = float(net.params[0][0, 0])
    b = float(net.params[1][0])
    x, y = 1.7, -0.4
    pred, cache = net.forward_cache(np.array([[x]]))
    grads, _ = net.backward(cache, 2.0 * (pred - y))
    residual = w * x + b - y
    assert grads[0][0, 0] == pytest.approx(2.0 * residual * x, rel=1e-12)
    assert grads[1][0] == pytest.approx(2.0 * residual, rel=1e-12)


@pytest.mark.parametrize("sizes", [[5, 8, 3], [4, 8, 8, 2], [3, 16, 1]])
def test_backward_matches_central_differences(sizes):
    rng = make_rng(5)
    net = DenseNet(sizes, rng)
    x = rng.standard_normal((4, sizes[0]))
    gout = rng.standard_normal((4, sizes[-1]))
    _, cache = net.forward_cache(x)
    grads, _ = net.backward(cache, gout)
    fd = fd_param_gradients(net, x, gout, h=1e-5)
    worst = 0.0
    for (pi, i), est in fd.items():
        got = grads[pi].ravel()[i]
        worst = max(worst, abs(got - est) / max(abs(got), abs(est), 1e-8))
    assert worst <= 1e-4


def test_backward_input_gradient_matches_differences():
    rng = make_rng(6)
    net = DenseNet([5, 8, 3], rng)
    x = rng.standard_normal((2, 5))
    gout = rng.standard_normal((2, 3))
    _, cache = net.forward_cache(x)
    _, gx = net.backward(cache, gout)
    h = 1e-5
    for i in range(x.size):
        orig = x.ravel()[i]
        x.ravel()[i] = orig + h
        lp = float(np.sum(net.forward(x) * gout))
        x.ravel()[i] = orig - h
        lm = float(np.sum(net.forward(x) * gout))
        x.ravel()[i] = orig
        fd = (lp - lm) / (2 * h)
        assert abs(fd - gx.ravel()[i]) <= 1e-4 * max(abs(fd), 1e-3)


def test_zero_loss_gradient_gives_zero_param_gradients():
    rng = make_rng(7)
    net = DenseNet([3, 6, 2], rng)
    _, cache = net.forward_cache(rng.standard_normal((3, 3)))
    grads, gx = net.backward(cache, np.zeros((3, 2)))
    assert all(np.all(g == 0) for g in grads)
    assert np.all(gx == 0)


def test_soft_update_extremes():
    rng = make_rng(8)
    src = DenseNet([3, 4, 2], rng)
    tgt = src.copy()
    for p in src.params:
        p += 1.0
    frozen = [p.copy() for p in tgt.params]
    soft_update(tgt, src, 0.0)
    assert all(np.array_equal(a, b) for a, b in zip(tgt.params, frozen))
    soft_update(tgt, src, 1.0)
    assert all(np.array_equal(a, b) for a, b in zip(tgt.params, src.params))


def test_soft_update_interpolates():
    rng = make_rng(9)
    src = DenseNet([2, 2], rng)
    tgt = src.copy()
    for p in src.params:
        p += 2.0
    before = [p.copy() for p in tgt.params]
    soft_update(tgt, src, 0.25)
    for p, b, s in zip(tgt.params, before, src.params):
        assert np.allclose(p, 0.75 * b + 0.25 * s)


def test_adam_minimizes_quadratic():
    p = np.array([10.0])
    opt = Adam([p], lr=0.1)
    for _ in range(500):
        opt.step([p], [2.0 * (p - 3.0)])
    assert p[0] == pytest.approx(3.0, abs=1e-3)


def test_adam_matches_reference_formula():
    # one step of the canonical update from zero moments
    p = np.array([1.0, -2.0])
    g = np.array([0.3, -0.7])
    opt = Adam([p.copy()], lr=1e-2)
    q = p.copy()
    opt.step([q], [g.copy()])
    m = 0.1 * g
    v = 0.001 * g * g
    mhat = m / (1 - 0.9)
    vhat = v / (1 - 0.999)
    expected = p - 1e-2 * mhat / (np.sqrt(vhat) + 1e-8)
    assert np.allclose(q, expected, atol=1e-12)
