"""Classic separate source/channel coding link."""
from ._backend import BACKEND
from .huffman import (HuffmanCodebook, HuffmanCodingError, HuffmanTruncationError, byte_frequencies,
                      huffman_build, huffman_decode, huffman_encode)
from .link import LinkStats, classic_transmit_sentence
from .qam import ber_nearest_neighbor, qam64_demodulate, qam64_modulate
from .rs import RsDecodeError, RsParams, RsShapeError, rs_decode, rs_encode

__all__ = [
    "BACKEND", "HuffmanCodebook", "HuffmanCodingError", "HuffmanTruncationError", "LinkStats",
    "RsDecodeError", "RsParams", "RsShapeError", "ber_nearest_neighbor", "byte_frequencies",
    "classic_transmit_sentence", "huffman_build", "huffman_decode", "huffman_encode",
    "qam64_demodulate", "qam64_modulate", "rs_decode", "rs_encode",
]
