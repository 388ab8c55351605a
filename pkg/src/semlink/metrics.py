"""Sentence-level BLEU and positional word accuracy."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class BleuWeights:
    u: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self):
        if not self.u or any(w < 0 for w in self.u):
            raise ValueError("BLEU weights must be a non-empty sequence of non-negative reals")
        if abs(sum(self.u) - 1.0) > 1e-9:
            raise ValueError(f"BLEU weights must sum to 1, got {sum(self.u)}")

    @classmethod
    def up_to(cls, n: int) -> "BleuWeights":
        """Uniform weights over 1..n grams (BLEU-n)."""
        return cls(tuple([1.0 / n] * n))


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tokens = list(tokens)
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def modified_precision(candidate: Sequence[str], reference: Sequence[str], n: int) -> tuple[Fraction, bool]:
    """Clipped n-gram precision as an exact fraction.

    Returns ``(p_n, valid)``; ``valid`` is False when the candidate is shorter
    than ``n`` words, in which case ``p_n`` is 0.
    """
    cand = ngram_counts(candidate, n)
    total = sum(cand.values())
    if total == 0:
        return Fraction(0), False
    ref = ngram_counts(reference, n)
    clipped = sum(min(c, ref[g]) for g, c in cand.items())
    return Fraction(clipped, total), True


def bleu(candidate: Sequence[str], reference: Sequence[str],
         weights: BleuWeights = BleuWeights(), literal_brevity: bool = False) -> float:
    """Sentence BLEU with a brevity term and 1/(2*count) smoothing of zero precisions.

    The default brevity term ``min(1 - len(ref)/len(cand), 0)`` penalizes short
    candidates. ``literal_brevity=True`` swaps the ratio to
    ``min(1 - len(cand)/len(ref), 0)``, which penalizes long ones instead.
    Orders longer than the candidate are dropped and the remaining weights
    renormalized.
    """
    candidate, reference = list(candidate), list(reference)
    if not reference:
        raise ValueError("reference must be non-empty")
    if not candidate:
        return 0.0
    lc, lr = len(candidate), len(reference)
    if literal_brevity:
        log_bleu = min(1.0 - lc / lr, 0.0)
    else:
        log_bleu = min(1.0 - lr / lc, 0.0)
    orders = [(n, u) for n, u in enumerate(weights.u, start=1) if u > 0 and n <= lc]
    norm = sum(u for _, u in orders)
    for n, u in orders:
        p, _ = modified_precision(candidate, reference, n)
        if p == 0:
            p = Fraction(1, 2 * (lc - n + 1))
        log_bleu += (u / norm) * math.log(p)
    return min(math.exp(log_bleu), 1.0)


def word_accuracy(candidate: Sequence[str], reference: Sequence[str]) -> float:
    denom = max(len(candidate), len(reference))
    if denom == 0:
        return 1.0
    return sum(a == b for a, b in zip(candidate, reference)) / denom
