"""Systematic Reed-Solomon RS(n, k) over GF(256) with primitive polynomial 0x11D."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels


class RsShapeError(ValueError):
    pass


class RsDecodeError(Exception):
    """More errors than the code can correct.

    ``systematic`` holds the received (uncorrected) data symbols so a link can
    pass them through the way real hardware would.
    """

    def __init__(self, message, systematic):
        super().__init__(message)
        self.systematic = systematic


@dataclass(frozen=True)
class RsParams:
    n: int = 42
    k: int = 30
    prim: int = 0x11D

    def __post_init__(self):
        if not 0 < self.k < self.n <= 255:
            raise ValueError(f"need 0 < k < n <= 255, got n={self.n}, k={self.k}")
        if self.t < 1:
            raise ValueError(f"RS({self.n},{self.k}) corrects no errors")
        if self.prim != 0x11D:
            raise ValueError("only the 0x11D field polynomial is supported")

    @property
    def nsym(self) -> int:
        return self.n - self.k

    @property
    def t(self) -> int:
        return (self.n - self.k) // 2


def _as_symbols(seq, length, what):
    arr = np.asarray(seq, dtype=np.int64).ravel()
    if arr.size != length:
        raise RsShapeError(f"{what} must have {length} symbols, got {arr.size}")
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise RsShapeError(f"{what} symbols must lie in [0, 255]")
    return arr


def rs_encode(params: RsParams, data) -> np.ndarray:
    msg = _as_symbols(data, params.k, "data")
    parity = kernels.encode_parity(bytes(msg.astype(np.uint8)), params.nsym)
    return np.concatenate([msg, np.asarray(parity, dtype=np.int64)]).astype(np.uint8)


def rs_decode(params: RsParams, received) -> tuple[np.ndarray, int]:
    """Return ``(data, corrected_count)`` or raise :class:`RsDecodeError`."""
    rx = _as_symbols(received, params.n, "codeword")
    cw = [int(v) for v in rx]
    count = kernels.decode(cw, params.nsym)
    if count < 0 or count > params.t:
        raise RsDecodeError(f"RS({params.n},{params.k}): uncorrectable block",
                            rx[: params.k].astype(np.uint8))
    return np.asarray(cw[: params.k], dtype=np.uint8), count
