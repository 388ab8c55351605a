"""Semantic text transmission over noisy channels.

A transformer joint source-channel codec trained with a mutual-information
term, a Huffman + Reed-Solomon + 64-QAM baseline, channel models and BLEU
scoring.
"""
from importlib.resources import files

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled corpus file (``captions_train.txt``, ``captions_heldout.txt``)."""
    return files(__name__) / "data" / name
