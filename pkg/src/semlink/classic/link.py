"""Separate source/channel coding baseline: Huffman -> RS(n, k) -> 64-QAM -> channel."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import ChannelConfig, apply_channel, make_rng
from .huffman import HuffmanCodebook, HuffmanTruncationError, huffman_decode, huffman_encode
from .qam import qam64_demodulate, qam64_modulate
from .rs import RsDecodeError, RsParams, rs_decode, rs_encode

HEADER_BYTES = 2


@dataclass
class LinkStats:
    complex_symbols: int = 0
    rs_blocks: int = 0
    rs_blocks_failed: int = 0
    rs_symbols_corrected: int = 0
    bit_errors_pre_rs: int = 0
    bit_errors_post_rs: int = 0
    coded_bits: int = 0
    payload_bits: int = 0
    corrupted: bool = False
    stages: dict = field(default_factory=dict, repr=False)


def _bits_to_bytes(bits) -> np.ndarray:
    return np.packbits(np.asarray(bits, dtype=np.uint8))  # big-endian within bytes


def _bytes_to_bits(data) -> np.ndarray:
    return np.unpackbits(np.asarray(data, dtype=np.uint8)).astype(np.int64)


def _hex(bits) -> str:
    return _bits_to_bytes(bits).tobytes().hex()


def build_payload(huff_bits, k: int) -> np.ndarray:
    """Header (pad length in bits, big-endian u16) + packed Huffman bits, zero-padded to k."""
    nbits = len(huff_bits)
    body_bytes = -(-nbits // 8)
    total = HEADER_BYTES + body_bytes
    total_padded = -(-total // k) * k
    pad_bits = (body_bytes * 8 - nbits) + (total_padded - total) * 8
    payload = np.zeros(total_padded, dtype=np.uint8)
    payload[0] = (pad_bits >> 8) & 0xFF
    payload[1] = pad_bits & 0xFF
    if nbits:
        payload[HEADER_BYTES:HEADER_BYTES + body_bytes] = _bits_to_bytes(huff_bits)
    return payload


def parse_payload(payload) -> tuple[np.ndarray, bool]:
    """Return the Huffman bit stream and whether the header was inconsistent."""
    payload = np.asarray(payload, dtype=np.uint8)
    pad = (int(payload[0]) << 8) | int(payload[1])
    body = _bytes_to_bits(payload[HEADER_BYTES:])
    if pad > body.size:
        return body[:0], True
    return body[: body.size - pad], False


def classic_transmit_sentence(sentence: str, huff: HuffmanCodebook, rs: RsParams,
                              ch: ChannelConfig, rng: np.random.Generator | None = None,
                              keep_stages: bool = False) -> tuple[str, LinkStats]:
    if rng is None:
        rng = make_rng(ch.seed)
    stats = LinkStats()

    src = sentence.encode("utf-8")
    huff_bits = huffman_encode(huff, src)
    payload = build_payload(huff_bits, rs.k)
    blocks = payload.reshape(-1, rs.k)
    codewords = np.stack([rs_encode(rs, b) for b in blocks])
    coded_bits = _bytes_to_bits(codewords.ravel())
    tx, pad = qam64_modulate(coded_bits)

    rx = apply_channel(tx, ch, rng)

    rx_bits = qam64_demodulate(rx, ch.h)[: coded_bits.size]
    rx_words = _bits_to_bytes(rx_bits).reshape(-1, rs.n)
    out_blocks = []
    for word in rx_words:
        try:
            data, count = rs_decode(rs, word)
            stats.rs_symbols_corrected += count
        except RsDecodeError as err:
            data = err.systematic
            stats.rs_blocks_failed += 1
        out_blocks.append(data)
    rx_payload = np.concatenate(out_blocks)
    rx_huff_bits, bad_header = parse_payload(rx_payload)

    stats.complex_symbols = tx.size // 2
    stats.rs_blocks = len(codewords)
    stats.coded_bits = int(coded_bits.size)
    stats.payload_bits = int(payload.size * 8)
    stats.bit_errors_pre_rs = int(np.count_nonzero(rx_bits != coded_bits))
    stats.bit_errors_post_rs = int(np.count_nonzero(_bytes_to_bits(rx_payload) != _bytes_to_bits(payload)))
    stats.corrupted = bad_header
    if keep_stages:
        stats.stages = {
            "source": src.hex(),
            "huffman": _hex(huff_bits),
            "payload": payload.tobytes().hex(),
            "coded": _hex(coded_bits),
            "received": _hex(rx_bits),
            "decoded_payload": rx_payload.tobytes().hex(),
        }

    try:
        out = huffman_decode(huff, rx_huff_bits)
    except HuffmanTruncationError as err:
        out = err.decoded
        stats.corrupted = True
    text = out.decode("utf-8", errors="replace")
    if text.encode("utf-8") != out:
        stats.corrupted = True
    return text, stats


def write_stage_dump(stats: LinkStats, path) -> None:
    """One ``name hex`` line per link stage for cross-implementation diffing."""
    with open(path, "w", encoding="ascii") as f:
        for name, value in stats.stages.items():
            f.write(f"{name} {value}\n")
