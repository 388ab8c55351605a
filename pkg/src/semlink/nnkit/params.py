"""Named parameter containers with gradient and Adam moment slots."""
from __future__ import annotations

import math

import numpy as np


class ParamSet:
    """Ordered map from a dotted path (``"enc.layer0.attn.wq"``) to an array.

    Gradients and Adam moments are kept shape-identical to their parameters.
    """

    def __init__(self, name: str, dtype=np.float64):
        self.name = name
        self.dtype = np.dtype(dtype)
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.step = 0

    def add(self, path: str, value) -> np.ndarray:
        if path in self.params:
            raise KeyError(f"duplicate parameter {path!r}")
        arr = np.array(value, dtype=self.dtype)
        self.params[path] = arr
        self.grads[path] = np.zeros_like(arr)
        self.m[path] = np.zeros_like(arr)
        self.v[path] = np.zeros_like(arr)
        return arr

    def glorot(self, path: str, fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        return self.add(path, rng.uniform(-limit, limit, size=(fan_in, fan_out)))

    def zeros(self, path: str, shape) -> np.ndarray:
        return self.add(path, np.zeros(shape))

    def ones(self, path: str, shape) -> np.ndarray:
        return self.add(path, np.ones(shape))

    def __getitem__(self, path: str) -> np.ndarray:
        return self.params[path]

    def __contains__(self, path: str) -> bool:
        return path in self.params

    def __iter__(self):
        return iter(self.params)

    def __len__(self) -> int:
        return len(self.params)

    def items(self):
        return self.params.items()

    def accumulate(self, path: str, grad) -> None:
        self.grads[path] += grad

    def zero_grad(self) -> None:
        for g in self.grads.values():
            g.fill(0.0)

    def num_params(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy_values(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}

    def load_values(self, values: dict) -> None:
        for k, arr in values.items():
            if k not in self.params:
                raise KeyError(f"{self.name}: unknown parameter {k!r}")
            if self.params[k].shape != tuple(arr.shape):
                raise ValueError(f"{k}: expected shape {self.params[k].shape}, found {tuple(arr.shape)}")
            self.params[k][...] = arr
