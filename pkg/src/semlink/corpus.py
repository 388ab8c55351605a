"""Sentence corpora, vocabularies and fixed-length token sequences."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PAD, START, END, UNK = "<pad>", "<start>", "<end>", "<unk>"
RESERVED = (PAD, START, END, UNK)

DEFAULT_MAX_LEN = 32

_EDGE_PUNCT = re.compile(r"^[^\w<>]+|[^\w<>]+$")


class CorpusFormatError(ValueError):
    pass


def tokenize(sentence: str) -> list[str]:
    """Lowercase whitespace split with punctuation stripped from word edges."""
    words = []
    for raw in sentence.lower().split():
        w = _EDGE_PUNCT.sub("", raw)
        if w:
            words.append(w)
    return words


def normalize(sentence: str) -> str:
    return " ".join(tokenize(sentence))


def load_corpus(path) -> list[str]:
    """Read one sentence per non-empty line, trimmed, in file order."""
    path = Path(path)
    raw = path.read_bytes()
    out = []
    for lineno, line in enumerate(raw.split(b"\n"), start=1):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusFormatError(f"{path}: line {lineno} is not valid UTF-8 ({exc.reason})") from None
        text = text.strip()
        if text:
            out.append(text)
    return out


@dataclass(frozen=True)
class Vocabulary:
    token_to_id: dict[str, int]
    id_to_token: tuple[str, ...] = field(repr=False)

    pad_id = 0
    start_id = 1
    end_id = 2
    unk_id = 3

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Vocabulary":
        id_to_token = tuple(RESERVED) + tuple(tokens)
        token_to_id = {t: i for i, t in enumerate(id_to_token)}
        if len(token_to_id) != len(id_to_token):
            raise ValueError("duplicate tokens in vocabulary")
        return cls(token_to_id, id_to_token)

    def __len__(self) -> int:
        return len(self.id_to_token)

    @property
    def size(self) -> int:
        return len(self.id_to_token)

    def to_text(self) -> str:
        return "\n".join(self.id_to_token[len(RESERVED):]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Vocabulary":
        return cls.from_tokens(t for t in text.split("\n") if t)


def build_vocabulary(sentences: Sequence[str], min_freq: int = 1) -> Vocabulary:
    """Ids by descending frequency, ties broken lexicographically; reserved ids are 0-3."""
    if not sentences:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    if min_freq < 1:
        raise ValueError(f"min_freq must be positive, got {min_freq}")
    counts = Counter(w for s in sentences for w in tokenize(s))
    kept = sorted((w for w, c in counts.items() if c >= min_freq and w not in RESERVED),
                  key=lambda w: (-counts[w], w))
    return Vocabulary.from_tokens(kept)


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    true_len: int


def encode_sentence(vocab: Vocabulary, sentence: str, max_len: int = DEFAULT_MAX_LEN) -> TokenSequence:
    if max_len < 3:
        raise ValueError(f"max_len must be >= 3, got {max_len}")
    words = tokenize(sentence)[: max_len - 2]
    ids = [vocab.start_id] + [vocab.token_to_id.get(w, vocab.unk_id) for w in words] + [vocab.end_id]
    true_len = len(ids)
    ids += [vocab.pad_id] * (max_len - true_len)
    return TokenSequence(tuple(ids), true_len)


def decode_tokens(vocab: Vocabulary, ids: Iterable[int]) -> str:
    words = []
    n = len(vocab)
    for i in ids:
        i = int(i)
        if not 0 <= i < n:
            raise IndexError(f"token id {i} outside vocabulary range [0, {n})")
        if i == vocab.end_id:
            break
        if i in (vocab.start_id, vocab.pad_id):
            continue
        words.append(vocab.id_to_token[i])
    return " ".join(words)


def encode_batch(vocab: Vocabulary, sentences: Sequence[str], max_len: int = DEFAULT_MAX_LEN) -> np.ndarray:
    """Stack encoded sentences into an int64 array of shape (len(sentences), max_len)."""
    out = np.full((len(sentences), max_len), vocab.pad_id, dtype=np.int64)
    for row, s in enumerate(sentences):
        out[row] = encode_sentence(vocab, s, max_len).ids
    return out


# Caption-style sentences for desk-scale runs when no image-to-text output is at hand.
_SUBJECTS = ["a man", "a woman", "a young man", "a young woman", "an older man", "an older woman",
             "a smiling woman", "a smiling man", "a girl", "a boy"]
_HAIR = ["long blonde hair", "short brown hair", "curly black hair", "straight red hair",
         "long dark hair", "short gray hair", "wavy brown hair", "a bald head"]
_FEATURES = ["glasses", "a beard", "a mustache", "earrings", "a necklace", "red lipstick",
             "a hat", "bangs", "a tie", "heavy makeup"]
_ACTIONS = ["smiling at the camera", "looking to the side", "posing for a photo",
            "with a serious expression", "with an open mouth", "laughing", "in front of a wall",
            "at a red carpet event", "wearing a black jacket", "wearing a white shirt"]


def synthetic_captions(n: int, seed: int = 0) -> list[str]:
    """Generate ``n`` distinct portrait captions deterministically."""
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    out: list[str] = []
    while len(out) < n:
        subj = _SUBJECTS[rng.integers(len(_SUBJECTS))]
        form = rng.integers(4)
        if form == 0:
            s = f"{subj} with {_HAIR[rng.integers(len(_HAIR))]} {_ACTIONS[rng.integers(len(_ACTIONS))]}"
        elif form == 1:
            s = f"{subj} with {_FEATURES[rng.integers(len(_FEATURES))]} and {_HAIR[rng.integers(len(_HAIR))]}"
        elif form == 2:
            s = f"{subj} wearing {_FEATURES[rng.integers(len(_FEATURES))]} {_ACTIONS[rng.integers(len(_ACTIONS))]}"
        else:
            s = f"{subj} {_ACTIONS[rng.integers(len(_ACTIONS))]}"
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out
