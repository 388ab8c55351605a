"""Stateful layers over a shared :class:`ParamSet`.

Each layer registers its tensors under a path prefix, caches what it needs in
``forward`` and accumulates parameter gradients in ``backward``. A layer holds
one cache, so call ``forward``/``backward`` in strict pairs.
"""
from __future__ import annotations

import numpy as np

from . import functional as F
from .params import ParamSet


class Dense:
    def __init__(self, ps: ParamSet, prefix: str, fan_in: int, fan_out: int, rng):
        self.ps = ps
        self.w_path, self.b_path = prefix + ".w", prefix + ".b"
        ps.glorot(self.w_path, fan_in, fan_out, rng)
        ps.zeros(self.b_path, (fan_out,))

    def forward(self, x):
        self._x = x
        return F.dense_forward(self.ps[self.w_path], self.ps[self.b_path], x)

    def backward(self, dy):
        dx, dw, db = F.dense_backward(self.ps[self.w_path], self._x, dy)
        self.ps.accumulate(self.w_path, dw)
        self.ps.accumulate(self.b_path, db)
        return dx


class LayerNorm:
    def __init__(self, ps: ParamSet, prefix: str, dim: int, eps: float = 1e-5):
        self.ps = ps
        self.eps = eps
        self.g_path, self.b_path = prefix + ".gamma", prefix + ".beta"
        ps.ones(self.g_path, (dim,))
        ps.zeros(self.b_path, (dim,))

    def forward(self, x):
        y, self._cache = F.layernorm_forward(self.ps[self.g_path], self.ps[self.b_path], x, self.eps)
        return y

    def backward(self, dy):
        dx, dg, db = F.layernorm_backward(dy, self._cache)
        self.ps.accumulate(self.g_path, dg)
        self.ps.accumulate(self.b_path, db)
        return dx


class MultiHeadAttention:
    NAMES = ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo")

    def __init__(self, ps: ParamSet, prefix: str, dim: int, heads: int, rng):
        if dim % heads:
            raise F.ConfigError(f"model dim {dim} is not divisible by {heads} heads")
        self.ps = ps
        self.heads = heads
        self.paths = {n: f"{prefix}.{n}" for n in self.NAMES}
        for n in ("q", "k", "v", "o"):
            ps.glorot(self.paths["w" + n], dim, dim, rng)
            ps.zeros(self.paths["b" + n], (dim,))

    def _p(self):
        return {n: self.ps[path] for n, path in self.paths.items()}

    def forward(self, x, mask=None):
        y, self._cache = F.attention_forward(self._p(), x, self.heads, mask)
        return y

    def attention_weights(self):
        return self._cache[4]

    def backward(self, dy):
        dx, grads = F.attention_backward(self._p(), dy, self._cache)
        for n, g in grads.items():
            self.ps.accumulate(self.paths[n], g)
        return dx


class FeedForward:
    def __init__(self, ps: ParamSet, prefix: str, dim: int, hidden: int, rng):
        self.fc1 = Dense(ps, prefix + ".fc1", dim, hidden, rng)
        self.fc2 = Dense(ps, prefix + ".fc2", hidden, dim, rng)

    def forward(self, x):
        self._h = self.fc1.forward(x)
        return self.fc2.forward(F.relu_forward(self._h))

    def backward(self, dy):
        return self.fc1.backward(F.relu_backward(self._h, self.fc2.backward(dy)))


class TransformerLayer:
    """Post-norm block: LN(x + MHA(x)) then LN(h + FF(h))."""

    def __init__(self, ps: ParamSet, prefix: str, dim: int, heads: int, ff_dim: int, rng):
        self.attn = MultiHeadAttention(ps, prefix + ".attn", dim, heads, rng)
        self.ln1 = LayerNorm(ps, prefix + ".ln1", dim)
        self.ff = FeedForward(ps, prefix + ".ff", dim, ff_dim, rng)
        self.ln2 = LayerNorm(ps, prefix + ".ln2", dim)

    def forward(self, x, mask=None):
        h = self.ln1.forward(x + self.attn.forward(x, mask))
        return self.ln2.forward(h + self.ff.forward(h))

    def backward(self, dy):
        dh = self.ln2.backward(dy)
        dh = dh + self.ff.backward(dh)
        dx = self.ln1.backward(dh)
        return dx + self.attn.backward(dx)


class Embedding:
    def __init__(self, ps: ParamSet, prefix: str, vocab: int, dim: int, rng):
        self.ps = ps
        self.path = prefix + ".table"
        ps.glorot(self.path, vocab, dim, rng)

    def forward(self, ids):
        table = self.ps[self.path]
        if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
            raise IndexError(f"token id outside [0, {table.shape[0]})")
        self._ids = ids
        return table[ids]

    def backward(self, dy):
        g = np.zeros_like(self.ps[self.path])
        np.add.at(g, self._ids.ravel(), dy.reshape(-1, dy.shape[-1]))
        self.ps.accumulate(self.path, g)
