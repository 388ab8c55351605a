import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semlink.channel import ChannelConfig, DegenerateInputError, make_rng
from semlink.classic import _rs_py
from semlink.classic._backend import BACKEND, kernels
from semlink.classic.huffman import (
    HuffmanCodingError,
    HuffmanTruncationError,
    byte_frequencies,
    huffman_build,
    huffman_decode,
    huffman_encode,
)
from semlink.classic.link import build_payload, classic_transmit_sentence, parse_payload, write_stage_dump
from semlink.classic.qam import SCALE, ber_nearest_neighbor, constellation, qam64_demodulate, qam64_modulate
from semlink.classic.rs import RsDecodeError, RsParams, RsShapeError, rs_decode, rs_encode
from semlink.corpus import synthetic_captions

SENTENCES = synthetic_captions(200, 0)


# --- independent GF(256) oracle: bitwise carry-less arithmetic, no tables ---

def _oracle_mul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= 0x11D
    return r


def _oracle_pow(a, e):
    r = 1
    for _ in range(e):
        r = _oracle_mul(r, a)
    return r


def _oracle_inv(a):
    return next(b for b in range(1, 256) if _oracle_mul(a, b) == 1)


def _oracle_parity(msg, nsym):
    gen = [1]
    for j in range(nsym):
        root = _oracle_pow(2, j)
        nxt = [0] * (len(gen) + 1)
        for i, g in enumerate(gen):
            nxt[i] ^= g
            nxt[i + 1] ^= _oracle_mul(g, root)
        gen = nxt
    # schoolbook long division of msg(x) * x^nsym by the monic generator
    rem = list(msg) + [0] * nsym
    for i in range(len(msg)):
        coef = rem[i]
        if coef:
            for j in range(1, len(gen)):
                rem[i + j] ^= _oracle_mul(gen[j], coef)
    return rem[len(msg):]


def test_gf_tables_match_oracle():
    for a in range(256):
        for b in (0, 1, 2, 3, 29, 142, 255):
            assert _rs_py.gf_mul(a, b) == _oracle_mul(a, b)
    for a in range(1, 256):
        assert _rs_py.gf_div(1, a) == _oracle_inv(a)


# --- Huffman -------------------------------------------------------------

def test_huffman_lengths_examples():
    a, b, c, d = map(ord, "abcd")
    assert huffman_build({a: 2, b: 1, c: 1}).lengths() == {a: 1, b: 2, c: 2}
    assert huffman_build({a: 1, b: 1}).lengths() == {a: 1, b: 1}
    assert set(huffman_build({a: 5, b: 5, c: 5, d: 5}).lengths().values()) == {2}


def test_huffman_degenerate():
    with pytest.raises(DegenerateInputError):
        huffman_build({65: 3})


def test_huffman_deterministic_and_canonical():
    freqs = byte_frequencies(SENTENCES)
    b1, b2 = huffman_build(freqs), huffman_build(dict(reversed(list(freqs.items()))))
    assert b1 == b2
    codes = sorted(b1.code_of_symbol.items(), key=lambda kv: (len(kv[1]), kv[0]))
    # canonical: codes of equal length are consecutive integers in symbol order
    for (s1, c1), (s2, c2) in zip(codes, codes[1:]):
        if len(c1) == len(c2):
            assert int(c2, 2) == int(c1, 2) + 1


@settings(max_examples=50)
@given(st.dictionaries(st.integers(0, 255), st.integers(1, 1000), min_size=2, max_size=60))
def test_huffman_prefix_free_and_kraft(freqs):
    book = huffman_build(freqs)
    codes = list(book.code_of_symbol.values())
    for x, y in itertools.permutations(codes, 2):
        assert not y.startswith(x)
    assert book.kraft_sum() == pytest.approx(1.0)


def test_huffman_kraft_full_alphabet():
    book = huffman_build(byte_frequencies(SENTENCES))
    assert len(book.code_of_symbol) == 256
    assert book.kraft_sum() == 1.0


def test_huffman_encode_length():
    a, b = ord("a"), ord("b")
    book = huffman_build({a: 2, b: 1, ord("c"): 1})
    assert len(huffman_encode(book, b"aab")) == 4


def test_huffman_roundtrip_corpus():
    book = huffman_build(byte_frequencies(SENTENCES))
    for s in SENTENCES:
        data = s.encode()
        assert huffman_decode(book, huffman_encode(book, data)) == data


def test_huffman_bit_flip_corrupts():
    book = huffman_build(byte_frequencies(SENTENCES))
    data = SENTENCES[0].encode()
    bits = huffman_encode(book, data)
    bits[0] ^= 1
    try:
        out = huffman_decode(book, bits)
    except HuffmanTruncationError as err:
        out = err.decoded
    assert out != data


def test_huffman_errors():
    book = huffman_build({65: 1, 66: 1})
    with pytest.raises(HuffmanCodingError):
        huffman_encode(book, b"C")
    book = huffman_build({65: 4, 66: 2, 67: 1, 68: 1})
    bits = huffman_encode(book, b"AD")
    with pytest.raises(HuffmanTruncationError) as info:
        huffman_decode(book, bits[:-1])
    assert info.value.decoded == b"A"


# --- Reed-Solomon ---------------------------------------------------------

@pytest.fixture(params=["python", "compiled"])
def backend(request, monkeypatch):
    import semlink.classic.rs as rs_mod
    if request.param == "compiled":
        if BACKEND != "cython":
            pytest.skip("compiled kernels not built")
        monkeypatch.setattr(rs_mod, "kernels", kernels)
    else:
        monkeypatch.setattr(rs_mod, "kernels", _rs_py)
    return request.param


def test_rs_params():
    assert RsParams(42, 30).t == 6 and RsParams(7, 5).t == 1
    for n, k in ((5, 7), (7, 7), (256, 200), (5, 4)):
        with pytest.raises(ValueError):
            RsParams(n, k)


def test_rs_zero_and_shape(backend):
    p = RsParams(7, 5)
    assert not rs_encode(p, [0] * 5).any()
    with pytest.raises(RsShapeError):
        rs_encode(p, [1, 2, 3])
    with pytest.raises(RsShapeError):
        rs_decode(p, [0] * 6)


@pytest.mark.parametrize("n,k", [(7, 5), (42, 30), (255, 223)])
def test_rs_parity_matches_long_division(backend, n, k):
    p = RsParams(n, k)
    rng = make_rng(n)
    for _ in range(5):
        data = rng.integers(0, 256, k)
        cw = rs_encode(p, data)
        assert list(cw[:k]) == list(data)
        assert list(cw[k:]) == _oracle_parity([int(v) for v in data], n - k)
    assert list(rs_encode(p, list(range(1, k + 1)))[k:]) == _oracle_parity(list(range(1, k + 1)), n - k)


def test_rs75_known_vector():
    # parity of [1,2,3,4,5] from the bitwise long-division oracle
    assert list(rs_encode(RsParams(7, 5), [1, 2, 3, 4, 5])[5:]) == _oracle_parity([1, 2, 3, 4, 5], 2)


def test_rs_injective():
    p = RsParams(7, 5)
    seen = set()
    rng = make_rng(5)
    for _ in range(500):
        d = tuple(int(v) for v in rng.integers(0, 256, 5))
        seen.add((d, bytes(rs_encode(p, d))))
    assert len({c for _, c in seen}) == len({d for d, _ in seen})


def test_rs_clean_decode(backend):
    p = RsParams(42, 30)
    data = np.arange(30)
    out, count = rs_decode(p, rs_encode(p, data))
    assert list(out) == list(data) and count == 0


def test_rs75_exhaustive_single_error(backend):
    p = RsParams(7, 5)
    data = [1, 2, 3, 4, 5]
    cw = rs_encode(p, data)
    for pos in range(7):
        for val in range(1, 256):
            bad = cw.copy()
            bad[pos] ^= val
            out, count = rs_decode(p, bad)
            assert list(out) == data and count == 1


def test_rs42_random_errors(backend):
    p = RsParams(42, 30)
    rng = make_rng(42)
    for trial in range(300):
        data = rng.integers(0, 256, 30)
        cw = rs_encode(p, data)
        ne = int(rng.integers(1, 7))
        bad = cw.copy()
        pos = rng.choice(42, ne, replace=False)
        bad[pos] ^= rng.integers(1, 256, ne).astype(np.uint8)
        out, count = rs_decode(p, bad)
        assert np.array_equal(out, data) and count == ne


def test_rs42_seven_errors_detected_or_flagged(backend):
    p = RsParams(42, 30)
    rng = make_rng(7)
    for _ in range(200):
        data = rng.integers(0, 256, 30)
        cw = rs_encode(p, data)
        bad = cw.copy()
        pos = rng.choice(42, 7, replace=False)
        bad[pos] ^= rng.integers(1, 256, 7).astype(np.uint8)
        try:
            out, _ = rs_decode(p, bad)
        except RsDecodeError as err:
            assert np.array_equal(err.systematic, bad[:30])
            continue
        # a miscorrection still lands on a valid codeword, just the wrong one
        assert not np.array_equal(out, data)
        assert np.array_equal(rs_encode(p, out)[:30], out)


def test_backends_agree():
    rng = make_rng(99)
    for _ in range(300):
        n = int(rng.integers(5, 80))
        k = int(rng.integers(1, n - 1))
        cw = list(rng.integers(0, 256, n))
        cw = [int(v) for v in cw]
        assert _rs_py.encode_parity(cw[:k], n - k) == list(kernels.encode_parity(bytes(cw[:k]), n - k))
        a, b = cw[:], cw[:]
        assert _rs_py.decode(a, n - k) == kernels.decode(b, n - k)
        assert a == b


# --- QAM -------------------------------------------------------------------

def test_qam_table_entries():
    block, pad = qam64_modulate([0, 0, 0, 0, 0, 0])
    np.testing.assert_allclose(block, [-7 * SCALE, -7 * SCALE])
    assert pad == 0
    block, _ = qam64_modulate([1, 0, 0, 1, 0, 0])
    np.testing.assert_allclose(block, [7 * SCALE, 7 * SCALE])


def test_qam_padding_recorded():
    block, pad = qam64_modulate([1, 1, 1, 1])
    assert pad == 2 and block.size == 2


def test_qam_average_power():
    pts = constellation()
    # enumeration: 2 * (1 + 9 + 25 + 49) / 4 / 42 = 1
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert len(set(np.round(pts, 9))) == 64


@pytest.mark.parametrize("h", [1.0, 0.9])
def test_qam_exhaustive_roundtrip(h):
    labels = np.arange(64)
    bits = ((labels[:, None] >> np.arange(5, -1, -1)) & 1).ravel()
    block, _ = qam64_modulate(bits)
    assert np.array_equal(qam64_demodulate(h * block, h), bits)


def test_qam_gray_adjacency():
    pts = constellation()
    level = {(round(p.real / SCALE), round(p.imag / SCALE)): lab for lab, p in enumerate(pts)}
    pairs = 0
    for (i, q), lab in level.items():
        for di, dq in ((2, 0), (0, 2)):
            other = level.get((i + di, q + dq))
            if other is not None:
                assert bin(lab ^ other).count("1") == 1
                pairs += 1
    assert pairs == 2 * 8 * 7


def test_ber_matches_approximation_small():
    rng = make_rng(3)
    bits = rng.integers(0, 2, 600_000)
    block, _ = qam64_modulate(bits)
    from semlink.channel import apply_channel
    rx = qam64_demodulate(apply_channel(block, ChannelConfig.awgn(18.0, 3), rng))
    ber = np.mean(rx != bits)
    assert abs(ber / ber_nearest_neighbor(18.0) - 1) < 0.1


# --- link ------------------------------------------------------------------

@pytest.fixture(scope="module")
def book():
    return huffman_build(byte_frequencies(SENTENCES))


def test_payload_roundtrip():
    for nbits in (0, 1, 7, 8, 100, 239, 240, 241):
        bits = list(make_rng(nbits).integers(0, 2, nbits))
        payload = build_payload(bits, 30)
        assert payload.size % 30 == 0
        out, bad = parse_payload(payload)
        assert not bad and list(out) == bits


def test_link_noiseless_lossless(book):
    rs = RsParams(42, 30)
    for s in SENTENCES:
        out, stats = classic_transmit_sentence(s, book, rs, ChannelConfig.awgn(math.inf))
        assert out == s
        assert stats.bit_errors_pre_rs == 0 and stats.rs_blocks_failed == 0
        assert stats.complex_symbols == math.ceil(stats.coded_bits / 6)


def test_link_fading_noiseless(book):
    out, _ = classic_transmit_sentence(SENTENCES[3], book, RsParams(7, 5), ChannelConfig.fading(0.9, math.inf))
    assert out == SENTENCES[3]


def test_link_low_snr_flags_corruption(book):
    rs = RsParams(42, 30)
    rng = make_rng(0)
    results = [classic_transmit_sentence(s, book, rs, ChannelConfig.awgn(0.0), rng) for s in SENTENCES[:20]]
    assert all(st.rs_blocks_failed > 0 for _, st in results)
    assert all(out != s for (out, _), s in zip(results, SENTENCES[:20]))


def test_link_deterministic(book):
    rs = RsParams(42, 30)
    a = classic_transmit_sentence(SENTENCES[5], book, rs, ChannelConfig.awgn(16.0, 9))
    b = classic_transmit_sentence(SENTENCES[5], book, rs, ChannelConfig.awgn(16.0, 9))
    assert a == b


def test_stage_dump(book, tmp_path):
    _, stats = classic_transmit_sentence("a man", book, RsParams(42, 30), ChannelConfig.awgn(math.inf),
                                         keep_stages=True)
    path = tmp_path / "stages.txt"
    write_stage_dump(stats, path)
    lines = path.read_text().splitlines()
    assert [ln.split()[0] for ln in lines] == ["source", "huffman", "payload", "coded", "received",
                                                "decoded_payload"]
    assert lines[0].split()[1] == b"a man".hex()


@pytest.mark.xfail(reason="hard-decision 64-QAM at 18 dB E_s/N0 gives ~19% RS symbol errors, "
                          "beyond RS(42,30)'s 6/42 correction radius", strict=True)
def test_link_18db_sentence_error_near_zero(book):
    rs = RsParams(42, 30)
    sents = synthetic_captions(1000, 1)
    errors = 0
    for i, s in enumerate(sents):
        out, _ = classic_transmit_sentence(s, book, rs, ChannelConfig.awgn(18.0), make_rng(i))
        errors += out != s
    assert errors / len(sents) < 0.01
