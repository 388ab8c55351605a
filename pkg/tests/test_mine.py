import math

import numpy as np
import pytest

from semlink.channel import DegenerateInputError, make_rng
from semlink.mine import (
    MineEstimator,
    bound_and_grad,
    correlated_gaussians,
    derangement,
    estimate,
    gaussian_mi,
    mine_lower_bound,
    mine_train_step,
)
from semlink.nnkit import gradient_check


def _constant_critic(est, c):
    for k in est.ps.params:
        est.ps[k][...] = 0.0
    est.ps["mine.fc3.b"][...] = c


def test_gaussian_mi_closed_form():
    assert gaussian_mi(0.9) == pytest.approx(0.8304, abs=1e-4)
    assert gaussian_mi(0.0) == 0.0


def test_derangement_has_no_fixed_points():
    rng = make_rng(3)
    for n in (2, 3, 17, 256):
        p = derangement(n, rng)
        assert sorted(p) == list(range(n))
        assert not np.any(p == np.arange(n))
    with pytest.raises(DegenerateInputError):
        derangement(1, rng)


def test_constant_critic_gives_zero_bound():
    est = MineEstimator(2, seed=0)
    rng = make_rng(1)
    pairs = rng.standard_normal((50, 4))
    for c in (0.0, 3.7, -12.0):
        _constant_critic(est, c)
        assert mine_lower_bound(est, pairs, pairs[::-1]) == pytest.approx(0.0, abs=1e-12)


def test_bound_shift_invariant():
    est = MineEstimator(1, seed=0)
    rng = make_rng(2)
    j, m = rng.standard_normal((64, 2)), rng.standard_normal((64, 2))
    base = mine_lower_bound(est, j, m)
    est.ps["mine.fc3.b"][...] += 250.0
    assert mine_lower_bound(est, j, m) == pytest.approx(base, abs=1e-9)


def test_small_batch_rejected():
    est = MineEstimator(1)
    with pytest.raises(DegenerateInputError):
        mine_lower_bound(est, np.zeros((1, 2)), np.zeros((1, 2)))
    with pytest.raises(DegenerateInputError):
        mine_train_step(est, np.zeros(1), np.zeros(1))


def test_training_is_deterministic():
    def run():
        est = MineEstimator(1, seed=4)
        data = make_rng(5)
        out = []
        for _ in range(20):
            x, y = correlated_gaussians(64, 0.5, data)
            out.append(mine_train_step(est, x, y, 1e-3)[1])
        return out, est.ps["mine.fc1.w"].copy()
    a, b = run(), run()
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])


def test_mine_gradcheck_params_and_inputs():
    est = MineEstimator(2, hidden=8, seed=0)
    rng = make_rng(6)
    x, y = rng.standard_normal((12, 2)), rng.standard_normal((12, 2))
    perm = derangement(12, rng)

    def f(backward):
        r = bound_and_grad(est, x, y, perm, param_grads=backward)
        return r.bound
    assert gradient_check(f, est.ps, samples=150) < 1e-4

    # input gradients against central differences
    g = bound_and_grad(est, x, y, perm, param_grads=False)
    eps = 1e-6
    for arr, grad in ((x, g.dx), (y, g.dy)):
        for i, j in [(0, 0), (5, 1), (11, 0)]:
            orig = arr[i, j]
            arr[i, j] = orig + eps
            up = bound_and_grad(est, x, y, perm, param_grads=False).bound
            arr[i, j] = orig - eps
            down = bound_and_grad(est, x, y, perm, param_grads=False).bound
            arr[i, j] = orig
            num = (up - down) / (2 * eps)
            assert abs(grad[i, j] - num) / max(abs(num), abs(grad[i, j]), 1e-6) < 1e-4


def test_param_grads_flag_leaves_grads_untouched():
    est = MineEstimator(1, hidden=4)
    rng = make_rng(0)
    x, y = rng.standard_normal((8, 1)), rng.standard_normal((8, 1))
    bound_and_grad(est, x, y, derangement(8, rng), param_grads=False)
    assert all(not g.any() for g in est.ps.grads.values())


def test_copy_channel_has_large_bound():
    est = MineEstimator(1, seed=0)
    rng = make_rng(7)
    for _ in range(2000):
        x = rng.standard_normal(128)
        mine_train_step(est, x, x.copy(), 1e-3)
    x = rng.standard_normal(4000)
    assert estimate(est, x, x.copy()) > 2.0


def test_ema_variant_runs_finite():
    est = MineEstimator(1, seed=0, ema_decay=0.99)
    data = make_rng(8)
    for _ in range(50):
        x, y = correlated_gaussians(64, 0.9, data)
        _, b = mine_train_step(est, x, y, 1e-3)
        assert math.isfinite(b)
