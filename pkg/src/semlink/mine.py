"""Donsker-Varadhan neural lower bound on I(X; Y) (MINE).

The critic ``f_T`` is a perceptron with two ReLU hidden layers and a linear
scalar output, applied to concatenated ``(x_i, y_j)`` rows. Product-of-marginal
samples come from an in-batch cyclic derangement of ``y``.

The raw DV gradient is used by default; ``ema_decay`` switches on the
moving-average denominator correction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import DegenerateInputError, make_rng
from .nnkit import Dense, ParamSet, adam_step
from .nnkit.functional import relu_backward, relu_forward


class NonFiniteError(FloatingPointError):
    pass


class MineEstimator:
    def __init__(self, sample_dim: int, hidden: int = 64, seed: int = 0, dtype=np.float64,
                 ema_decay: float | None = None):
        self.sample_dim = sample_dim
        self.input_dim = 2 * sample_dim
        self.hidden = hidden
        self.ema_decay = ema_decay
        self._ema = None
        self.ps = ParamSet("mine", dtype)
        rng = make_rng(seed)
        self.fc1 = Dense(self.ps, "mine.fc1", self.input_dim, hidden, rng)
        self.fc2 = Dense(self.ps, "mine.fc2", hidden, hidden, rng)
        self.fc3 = Dense(self.ps, "mine.fc3", hidden, 1, rng)
        self.rng = make_rng(seed ^ 0x5EED)

    def critic(self, pairs):
        """f_T over rows of ``pairs``; caches activations for :meth:`critic_backward`."""
        if pairs.shape[-1] != self.input_dim:
            raise ValueError(f"critic expects {self.input_dim} inputs, got {pairs.shape[-1]}")
        self._h1 = self.fc1.forward(pairs)
        self._h2 = self.fc2.forward(relu_forward(self._h1))
        return self.fc3.forward(relu_forward(self._h2))[:, 0]

    def critic_backward(self, df):
        d = self.fc3.backward(df[:, None])
        d = self.fc2.backward(relu_backward(self._h2, d))
        return self.fc1.backward(relu_backward(self._h1, d))


def derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random permutation with no fixed points (a single n-cycle)."""
    if n < 2:
        raise DegenerateInputError("need at least two samples to shuffle")
    order = rng.permutation(n)
    perm = np.empty(n, dtype=np.int64)
    perm[order] = np.roll(order, -1)
    return perm


def _dv(f_joint, f_marg):
    m = float(np.max(f_marg))
    log_mean_exp = m + math.log(float(np.mean(np.exp(f_marg - m))))
    return float(np.mean(f_joint)) - log_mean_exp


def mine_lower_bound(est: MineEstimator, joint_pairs, marginal_pairs) -> float:
    """mean(f_T(joint)) - log mean(exp f_T(marginal)), max-shifted."""
    joint_pairs = np.asarray(joint_pairs, dtype=est.ps.dtype)
    marginal_pairs = np.asarray(marginal_pairs, dtype=est.ps.dtype)
    if len(joint_pairs) < 2 or len(marginal_pairs) < 2:
        raise DegenerateInputError("MINE needs a batch of at least two pairs")
    return _dv(est.critic(joint_pairs), est.critic(marginal_pairs))


@dataclass
class BoundGrad:
    bound: float
    dx: np.ndarray
    dy: np.ndarray
    perm: np.ndarray = field(repr=False)


def bound_and_grad(est: MineEstimator, x, y, perm, param_grads: bool = True,
                   denom_scale: float | None = None) -> BoundGrad:
    """DV bound on aligned rows ``x``, ``y`` and its gradient w.r.t. both.

    With ``param_grads`` the critic gradients of the bound are accumulated into
    ``est.ps`` (ascent direction, not negated). ``denom_scale`` replaces the
    marginal term's normalizer in the gradient (moving-average correction).
    """
    n, d = x.shape
    joint = np.concatenate([x, y], axis=1)
    marg = np.concatenate([x, y[perm]], axis=1)
    if not param_grads:
        saved = {k: g.copy() for k, g in est.ps.grads.items()}
    fj = est.critic(joint)
    dj = est.critic_backward(np.full(n, 1.0 / n, dtype=joint.dtype))
    fm = est.critic(marg)
    shift = float(np.max(fm))
    e = np.exp(fm - shift)
    bound = float(np.mean(fj)) - (shift + math.log(float(np.mean(e))))
    if denom_scale is None:
        wm = e / e.sum()
    else:
        wm = np.exp(fm) / (n * denom_scale)
    dm = est.critic_backward(-wm)
    if not param_grads:
        for k, g in saved.items():
            est.ps.grads[k][...] = g
    dx = dj[:, :d] + dm[:, :d]
    dy = dj[:, d:].copy()
    np.add.at(dy, perm, dm[:, d:])
    return BoundGrad(bound, dx, dy, perm)


def mine_train_step(est: MineEstimator, x_batch, y_batch, lr: float = 1e-3,
                    rng: np.random.Generator | None = None) -> tuple[MineEstimator, float]:
    """One Adam ascent step on the bound (critic parameters only).

    Returns the estimator and the bound evaluated before the update.
    """
    x = np.asarray(x_batch, dtype=est.ps.dtype)
    y = np.asarray(y_batch, dtype=est.ps.dtype)
    if x.ndim == 1:
        x, y = x[:, None], y[:, None]
    if x.shape != y.shape:
        raise ValueError(f"misaligned batches {x.shape} and {y.shape}")
    rng = est.rng if rng is None else rng
    perm = derangement(len(x), rng)
    denom = None
    if est.ema_decay is not None:
        fm = est.critic(np.concatenate([x, y[perm]], axis=1))
        cur = float(np.mean(np.exp(fm)))
        est._ema = cur if est._ema is None else est.ema_decay * est._ema + (1 - est.ema_decay) * cur
        denom = est._ema
    est.ps.zero_grad()
    res = bound_and_grad(est, x, y, perm, denom_scale=denom)
    if not math.isfinite(res.bound):
        raise NonFiniteError(f"MINE bound became non-finite ({res.bound}) at step {est.ps.step + 1}")
    for g in est.ps.grads.values():
        g *= -1.0  # ascend the bound
    adam_step(est.ps, lr)
    return est, res.bound


def estimate(est: MineEstimator, x, y, rng: np.random.Generator | None = None) -> float:
    """Evaluate the bound on (x, y) with a fresh derangement."""
    x = np.asarray(x, dtype=est.ps.dtype)
    y = np.asarray(y, dtype=est.ps.dtype)
    if x.ndim == 1:
        x, y = x[:, None], y[:, None]
    rng = est.rng if rng is None else rng
    perm = derangement(len(x), rng)
    return mine_lower_bound(est, np.concatenate([x, y], 1), np.concatenate([x, y[perm]], 1))


def gaussian_mi(rho: float) -> float:
    return -0.5 * math.log(1.0 - rho * rho)


def correlated_gaussians(n: int, rho: float, rng: np.random.Generator):
    x = rng.standard_normal(n)
    y = rho * x + math.sqrt(1.0 - rho * rho) * rng.standard_normal(n)
    return x, y


def gaussian_benchmark(rho: float = 0.9, steps: int = 3000, batch: int = 256, lr: float = 1e-3,
                       eval_samples: int = 20000, seed: int = 0, hidden: int = 64) -> dict:
    """Train a critic on correlated 1-d Gaussians and report the bound on held-out data."""
    est = MineEstimator(1, hidden=hidden, seed=seed)
    data_rng = make_rng(seed + 1)
    trace = []
    for _ in range(steps):
        x, y = correlated_gaussians(batch, rho, data_rng)
        _, b = mine_train_step(est, x, y, lr)
        trace.append(b)
    x, y = correlated_gaussians(eval_samples, rho, data_rng)
    return {"rho": rho, "true_mi": gaussian_mi(rho) if abs(rho) < 1 else math.inf,
            "estimate": estimate(est, x, y), "train_tail_mean": float(np.mean(trace[-200:])),
            "steps": steps, "batch": batch}
