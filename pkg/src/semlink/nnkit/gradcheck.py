"""Central finite-difference checks against analytic gradients."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .params import ParamSet


def gradient_check(loss_fn: Callable[[bool], float], paramsets: ParamSet | Sequence[ParamSet],
                   eps: float = 1e-5, samples: int = 100, seed: int = 0,
                   floor: float = 1e-5) -> float:
    """Worst relative error between analytic and central-difference gradients.

    ``loss_fn(backward)`` must be deterministic; with ``backward=True`` it
    also accumulates gradients into the parameter sets. Coordinates are drawn
    uniformly over all parameters (``samples`` of them, or all if fewer). The
    relative error is ``|a - n| / max(|a|, |n|, floor)``.
    """
    if isinstance(paramsets, ParamSet):
        paramsets = [paramsets]
    for ps in paramsets:
        ps.zero_grad()
    loss_fn(True)
    analytic = [{k: g.copy() for k, g in ps.grads.items()} for ps in paramsets]
    for ps in paramsets:
        ps.zero_grad()

    coords = [(i, path, j) for i, ps in enumerate(paramsets)
              for path, p in ps.params.items() for j in range(p.size)]
    rng = np.random.default_rng(seed)
    if len(coords) > samples:
        pick = rng.choice(len(coords), size=samples, replace=False)
        coords = [coords[int(c)] for c in np.sort(pick)]

    worst = 0.0
    for i, path, j in coords:
        flat = paramsets[i].params[path].reshape(-1)
        orig = flat[j]
        flat[j] = orig + eps
        up = loss_fn(False)
        flat[j] = orig - eps
        down = loss_fn(False)
        flat[j] = orig
        num = (up - down) / (2.0 * eps)
        ana = analytic[i][path].reshape(-1)[j]
        err = abs(ana - num) / max(abs(ana), abs(num), floor)
        worst = max(worst, err)
    return worst
