import pytest
from hypothesis import given, strategies as st

from semlink.corpus import (
    CorpusFormatError,
    Vocabulary,
    build_vocabulary,
    decode_tokens,
    encode_sentence,
    load_corpus,
    normalize,
    synthetic_captions,
)


@pytest.fixture
def vocab():
    return build_vocabulary(["a b", "a c"], min_freq=1)


def test_load_skips_blank_lines(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("a man smiling\n\na woman with glasses\n", encoding="utf-8")
    assert load_corpus(p) == ["a man smiling", "a woman with glasses"]


def test_load_empty_and_trim(tmp_path):
    p = tmp_path / "e.txt"
    p.write_bytes(b"")
    assert load_corpus(p) == []
    p.write_text("  padded line \t\n", encoding="utf-8")
    assert load_corpus(p) == ["padded line"]


def test_load_3000_lines(tmp_path):
    lines = (synthetic_captions(1500, 0) * 2)
    p = tmp_path / "big.txt"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert len(load_corpus(p)) == 3000


def test_load_errors(tmp_path):
    with pytest.raises(OSError):
        load_corpus(tmp_path / "missing.txt")
    p = tmp_path / "bad.txt"
    p.write_bytes(b"fine\nbad \xff byte\n")
    with pytest.raises(CorpusFormatError, match="line 2"):
        load_corpus(p)


def test_vocabulary_ids(vocab):
    assert len(vocab) == 7
    assert vocab.token_to_id["a"] == 4
    assert vocab.token_to_id["b"] == 5 and vocab.token_to_id["c"] == 6
    assert (vocab.pad_id, vocab.start_id, vocab.end_id, vocab.unk_id) == (0, 1, 2, 3)
    for tok, i in vocab.token_to_id.items():
        assert vocab.id_to_token[i] == tok


def test_min_freq_threshold():
    assert len(build_vocabulary(["a b", "a c"], min_freq=2)) == 5


def test_vocabulary_deterministic():
    s = synthetic_captions(100, 3)
    assert build_vocabulary(s).to_text() == build_vocabulary(list(s)).to_text()
    assert Vocabulary.from_text(build_vocabulary(s).to_text()) == build_vocabulary(s)


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        build_vocabulary([])


def test_encode_examples(vocab):
    seq = encode_sentence(vocab, "a b", 6)
    assert seq.ids == (1, 4, 5, 2, 0, 0) and seq.true_len == 4
    assert encode_sentence(vocab, "a zzz", 6).ids == (1, 4, 3, 2, 0, 0)
    long = encode_sentence(vocab, " ".join(["a"] * 10), 6)
    assert long.ids == (1, 4, 4, 4, 4, 2) and long.true_len == 6


def test_encode_rejects_tiny_max_len(vocab):
    with pytest.raises(ValueError):
        encode_sentence(vocab, "a", 2)


def test_decode_examples(vocab):
    assert decode_tokens(vocab, [1, 4, 5, 2, 0]) == "a b"
    assert decode_tokens(vocab, [1, 2]) == ""
    assert decode_tokens(vocab, [1, 4, 3, 2]) == "a <unk>"
    with pytest.raises(IndexError):
        decode_tokens(vocab, [1, 99])


def test_punctuation_and_case():
    assert normalize("A Man, smiling!  (at camera)") == "a man smiling at camera"


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=0, max_size=5))
def test_roundtrip_property(words):
    vocab = build_vocabulary(["a b", "a c"])
    s = " ".join(words)
    assert decode_tokens(vocab, encode_sentence(vocab, s, 8).ids) == s


def test_roundtrip_corpus():
    sents = synthetic_captions(200, 0)
    vocab = build_vocabulary(sents)
    for s in sents:
        assert decode_tokens(vocab, encode_sentence(vocab, s, 16).ids) == normalize(s)
