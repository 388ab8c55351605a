"""Physical channel y = h*x + n over interleaved (re, im) real pairs.

SNR is E_s/N_0: unit average complex-symbol energy against total complex
noise variance, so each real dimension carries noise variance
``10**(-snr_db/10) / 2``.

Randomness comes from numpy's PCG64 bit generator (``numpy.random.PCG64``),
whose algorithm and stream are fixed and platform-independent; Gaussian draws
use ``Generator.standard_normal``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateInputError(ValueError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class ChannelConfig:
    kind: str = "awgn"
    h: float = 1.0
    snr_db: float = 10.0
    seed: int = 0
    noiseless: bool = False

    def __post_init__(self):
        if self.kind not in ("awgn", "fixed_fading"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not self.h > 0:
            raise ValueError(f"channel gain must be positive, got {self.h}")
        if self.kind == "awgn" and self.h != 1.0:
            raise ValueError("an awgn channel has unit gain")

    @classmethod
    def awgn(cls, snr_db: float, seed: int = 0) -> "ChannelConfig":
        return cls("awgn", 1.0, snr_db, seed, noiseless=math.isinf(snr_db) and snr_db > 0)

    @classmethod
    def fading(cls, h: float, snr_db: float, seed: int = 0) -> "ChannelConfig":
        return cls("fixed_fading", h, snr_db, seed, noiseless=math.isinf(snr_db) and snr_db > 0)

    def with_snr(self, snr_db: float) -> "ChannelConfig":
        return ChannelConfig(self.kind, self.h, snr_db, self.seed,
                             noiseless=math.isinf(snr_db) and snr_db > 0)


def _check_block(block: np.ndarray) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.shape[-1] % 2:
        raise ValueError(f"symbol block length must be even, got {block.shape[-1]}")
    return block


def complex_power(block) -> float:
    """Average power per complex symbol."""
    block = _check_block(block)
    return 2.0 * float(np.mean(block * block))


def normalize_power(block) -> np.ndarray:
    """Scale ``block`` to unit average complex-symbol power."""
    block = _check_block(block)
    if block.size == 0:
        raise DegenerateInputError("cannot normalize an empty block")
    p = complex_power(block)
    if p == 0.0:
        raise DegenerateInputError("cannot normalize an all-zero block")
    return block / math.sqrt(p)


def noise_sigma(snr_db: float) -> float:
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return math.sqrt(10.0 ** (-snr_db / 10.0) / 2.0)


def apply_channel(block, cfg: ChannelConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """``cfg.h * block`` plus N(0, noise_sigma(snr)^2) per real dimension.

    Without an explicit ``rng`` the generator is seeded from ``cfg.seed``. The
    noise realization depends only on the block shape and the generator state.
    """
    block = _check_block(block)
    if rng is None:
        rng = make_rng(cfg.seed)
    if cfg.noiseless:
        return cfg.h * block
    noise = rng.standard_normal(block.shape) * noise_sigma(cfg.snr_db)
    return cfg.h * block + noise
