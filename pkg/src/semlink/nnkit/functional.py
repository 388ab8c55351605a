"""Forward/backward kernels with hand-derived gradients.

Every ``*_forward`` returns its output plus whatever cache the matching
``*_backward`` needs. Arrays are numpy; the leading dimensions are treated as
a batch.
"""
from __future__ import annotations

import math

import numpy as np


class ShapeError(ValueError):
    pass


class ConfigError(ValueError):
    pass


def dense_forward(w, b, x):
    if x.shape[-1] != w.shape[0]:
        raise ShapeError(f"dense: input {x.shape} does not match weight {w.shape}")
    if b.shape != (w.shape[1],):
        raise ShapeError(f"dense: bias {b.shape} does not match weight {w.shape}")
    return x @ w + b


def dense_backward(w, x, dy):
    """Return ``(dx, dw, db)``."""
    x2 = x.reshape(-1, x.shape[-1])
    dy2 = dy.reshape(-1, dy.shape[-1])
    return dy @ w.T, x2.T @ dy2, dy2.sum(axis=0)


def relu_forward(x):
    return np.maximum(x, 0.0)


def relu_backward(x, dy):
    return dy * (x > 0)


def layernorm_forward(gamma, beta, x, eps=1e-5):
    if x.shape[-1] < 2:
        raise ShapeError("layernorm needs at least two features")
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv_std
    return gamma * xhat + beta, (xhat, inv_std, gamma)


def layernorm_backward(dy, cache):
    """Return ``(dx, dgamma, dbeta)``."""
    xhat, inv_std, gamma = cache
    d = xhat.shape[-1]
    dxhat = dy * gamma
    dx = inv_std / d * (d * dxhat - dxhat.sum(axis=-1, keepdims=True)
                        - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True))
    flat = dy.reshape(-1, d)
    return dx, (flat * xhat.reshape(-1, d)).sum(axis=0), flat.sum(axis=0)


def softmax(x, axis=-1):
    m = np.max(x, axis=axis, keepdims=True)
    e = np.exp(x - m)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(x, axis=-1):
    m = np.max(x, axis=axis, keepdims=True)
    s = x - m
    return s - np.log(np.exp(s).sum(axis=axis, keepdims=True))


def _split_heads(t, heads):
    b, n, d = t.shape
    return t.reshape(b, n, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(t):
    b, h, n, dh = t.shape
    return t.transpose(0, 2, 1, 3).reshape(b, n, h * dh)


def attention_forward(p, x, heads, mask=None):
    """Multi-head self-attention.

    ``p`` maps ``wq, bq, wk, bk, wv, bv, wo, bo`` to arrays; ``x`` is
    (batch, tokens, dim); ``mask`` is a boolean (batch, tokens) array that is
    True at padded key positions, or None.
    """
    d = x.shape[-1]
    if d % heads:
        raise ConfigError(f"model dim {d} is not divisible by {heads} heads")
    scale = 1.0 / math.sqrt(d // heads)
    q = _split_heads(dense_forward(p["wq"], p["bq"], x), heads)
    k = _split_heads(dense_forward(p["wk"], p["bk"], x), heads)
    v = _split_heads(dense_forward(p["wv"], p["bv"], x), heads)
    scores = (q @ k.transpose(0, 1, 3, 2)) * scale
    if mask is not None:
        scores = np.where(mask[:, None, None, :], -np.inf, scores)
    a = softmax(scores)
    ctx = _merge_heads(a @ v)
    out = dense_forward(p["wo"], p["bo"], ctx)
    return out, (x, q, k, v, a, ctx, scale, heads)


def attention_backward(p, dout, cache):
    """Return ``(dx, grads)`` with ``grads`` keyed like ``p``."""
    x, q, k, v, a, ctx, scale, heads = cache
    g = {}
    dctx, g["wo"], g["bo"] = dense_backward(p["wo"], ctx, dout)
    dctx = _split_heads(dctx, heads)
    da = dctx @ v.transpose(0, 1, 3, 2)
    dv = a.transpose(0, 1, 3, 2) @ dctx
    ds = a * (da - (da * a).sum(axis=-1, keepdims=True)) * scale
    dq = ds @ k
    dk = ds.transpose(0, 1, 3, 2) @ q
    dx = np.zeros_like(x)
    for name, dt in (("q", dq), ("k", dk), ("v", dv)):
        dxi, g["w" + name], g["b" + name] = dense_backward(p["w" + name], x, _merge_heads(dt))
        dx += dxi
    return dx, g


def cross_entropy(logits, targets, weight_mask):
    """Mean NLL over positions where ``weight_mask`` is True; returns ``(loss, dlogits)``."""
    logp = log_softmax(logits)
    count = int(weight_mask.sum())
    if count == 0:
        return 0.0, np.zeros_like(logits)
    picked = np.take_along_axis(logp, targets[..., None], axis=-1)[..., 0]
    loss = -float((picked * weight_mask).sum()) / count
    dlogits = np.exp(logp)
    np.put_along_axis(dlogits, targets[..., None],
                      np.take_along_axis(dlogits, targets[..., None], axis=-1) - 1.0, axis=-1)
    dlogits *= weight_mask[..., None] / count
    return loss, dlogits


def sinusoidal_positions(length, dim):
    pos = np.arange(length)[:, None]
    i = np.arange(dim)[None, :]
    angle = pos / np.power(10000.0, (2 * (i // 2)) / dim)
    return np.where(i % 2 == 0, np.sin(angle), np.cos(angle))
