from __future__ import annotations

import numpy as np

from .params import ParamSet


def adam_step(ps: ParamSet, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8, step: int | None = None) -> ParamSet:
    """One bias-corrected Adam update in place, then zero the gradients.

    ``step`` overrides the set's own 1-based step counter.
    """
    ps.step = ps.step + 1 if step is None else step
    t = ps.step
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    for path, p in ps.params.items():
        g = ps.grads[path]
        m, v = ps.m[path], ps.v[path]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    ps.zero_grad()
    return ps
