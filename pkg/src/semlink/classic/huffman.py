"""Canonical Huffman coding over byte symbols."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

from ..channel import DegenerateInputError


class HuffmanCodingError(ValueError):
    pass


class HuffmanTruncationError(ValueError):
    """Bit stream ended inside a code word; ``decoded`` holds the complete prefix."""

    def __init__(self, message, decoded: bytes):
        super().__init__(message)
        self.decoded = decoded


@dataclass(frozen=True)
class HuffmanCodebook:
    code_of_symbol: dict[int, str]
    canonical: bool = True

    def lengths(self) -> dict[int, int]:
        return {s: len(c) for s, c in self.code_of_symbol.items()}

    def kraft_sum(self) -> float:
        return sum(2.0 ** -len(c) for c in self.code_of_symbol.values())

    def decode_table(self) -> dict[str, int]:
        return {c: s for s, c in self.code_of_symbol.items()}


def _code_lengths(freqs: Mapping[int, int]) -> dict[int, int]:
    # heap items: (weight, smallest symbol in subtree, symbols); the symbol key
    # makes tie-breaking deterministic
    heap = [(w, s, (s,)) for s, w in sorted(freqs.items())]
    heapq.heapify(heap)
    depth = {s: 0 for s in freqs}
    while len(heap) > 1:
        w1, k1, s1 = heapq.heappop(heap)
        w2, k2, s2 = heapq.heappop(heap)
        for s in s1 + s2:
            depth[s] += 1
        heapq.heappush(heap, (w1 + w2, min(k1, k2), s1 + s2))
    return depth


def canonical_codes(lengths: Mapping[int, int]) -> dict[int, str]:
    code = 0
    prev_len = 0
    out = {}
    for s, ln in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
        code <<= ln - prev_len
        out[s] = format(code, f"0{ln}b")
        code += 1
        prev_len = ln
    return out


def huffman_build(freqs: Mapping[int, int]) -> HuffmanCodebook:
    freqs = {int(s): int(c) for s, c in freqs.items() if c > 0}
    if len(freqs) < 2:
        raise DegenerateInputError("Huffman coding needs at least two distinct symbols")
    for s in freqs:
        if not 0 <= s <= 255:
            raise HuffmanCodingError(f"symbol {s} is not a byte value")
    return HuffmanCodebook(canonical_codes(_code_lengths(freqs)))


def byte_frequencies(sentences, smoothing: int = 1) -> dict[int, int]:
    """UTF-8 byte counts over ``sentences``; ``smoothing`` is added to all 256 bytes."""
    counts = {b: smoothing for b in range(256)} if smoothing else {}
    for s in sentences:
        for b in s.encode("utf-8"):
            counts[b] = counts.get(b, 0) + 1
    return counts


def huffman_encode(book: HuffmanCodebook, data: bytes) -> list[int]:
    codes = book.code_of_symbol
    bits = []
    for b in data:
        try:
            bits.extend(1 if ch == "1" else 0 for ch in codes[b])
        except KeyError:
            raise HuffmanCodingError(f"byte 0x{b:02x} has no code word") from None
    return bits


def huffman_decode(book: HuffmanCodebook, bits) -> bytes:
    table = book.decode_table()
    out = bytearray()
    cur = ""
    maxlen = max(len(c) for c in table)
    for bit in bits:
        cur += "1" if bit else "0"
        sym = table.get(cur)
        if sym is not None:
            out.append(sym)
            cur = ""
        elif len(cur) >= maxlen:
            raise HuffmanTruncationError("invalid code prefix in bit stream", bytes(out))
    if cur:
        raise HuffmanTruncationError(f"stream ends inside a code word ({len(cur)} dangling bits)",
                                     bytes(out))
    return bytes(out)
