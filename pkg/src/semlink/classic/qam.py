"""Gray-mapped square 64-QAM with hard-decision demodulation."""
from __future__ import annotations

import math

import numpy as np

SCALE = 1.0 / math.sqrt(42.0)

# 3-bit group (MSB first) -> amplitude level on one axis
GRAY_LEVEL = {0b000: -7, 0b001: -5, 0b011: -3, 0b010: -1,
              0b110: +1, 0b111: +3, 0b101: +5, 0b100: +7}
_LEVELS = np.array([GRAY_LEVEL[v] for v in range(8)], dtype=np.float64)
# index by (level + 7) // 2 -> 3-bit value
_BITS_OF_LEVEL = np.zeros(8, dtype=np.int64)
for _v, _lvl in GRAY_LEVEL.items():
    _BITS_OF_LEVEL[(_lvl + 7) // 2] = _v
_SHIFTS = np.array([2, 1, 0])


def pad_bits(bits) -> tuple[np.ndarray, int]:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    pad = (-bits.size) % 6
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.int64)])
    return bits, pad


def qam64_modulate(bits) -> tuple[np.ndarray, int]:
    """Return ``(block, pad)``: interleaved (i, q) reals and the zero bits appended."""
    bits, pad = pad_bits(bits)
    groups = bits.reshape(-1, 2, 3)
    values = (groups << _SHIFTS).sum(axis=-1)  # (nsym, 2): i-group, q-group
    return (_LEVELS[values] * SCALE).ravel(), pad


def qam64_demodulate(block, h: float = 1.0) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.size % 2:
        raise ValueError("symbol block length must be even")
    if not h > 0:
        raise ValueError("channel gain must be positive")
    levels = block / (h * SCALE)
    idx = np.clip(np.floor((levels + 8.0) / 2.0), 0, 7).astype(np.int64)
    values = _BITS_OF_LEVEL[idx]
    return ((values[:, None] >> _SHIFTS) & 1).ravel()


def constellation() -> np.ndarray:
    """All 64 points as complex numbers, indexed by their 6-bit label."""
    labels = np.arange(64)
    bits = ((labels[:, None] >> np.arange(5, -1, -1)) & 1).ravel()
    block, _ = qam64_modulate(bits)
    return block[0::2] + 1j * block[1::2]


def q_function(x):
    from scipy.special import erfc
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2.0))


def ber_nearest_neighbor(snr_db: float) -> float:
    """Gray 64-QAM bit error approximation (4/6)(1 - 1/8) Q(sqrt(3 SNR / 63))."""
    snr = 10.0 ** (snr_db / 10.0)
    return float((4.0 / 6.0) * (1.0 - 1.0 / 8.0) * q_function(math.sqrt(3.0 * snr / 63.0)))
