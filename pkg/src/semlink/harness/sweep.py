"""BLEU-vs-SNR sweeps over the neural and classic links."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..channel import ChannelConfig, apply_channel, make_rng
from ..classic.huffman import byte_frequencies, huffman_build
from ..classic.link import classic_transmit_sentence, write_stage_dump
from ..classic.rs import RsParams
from ..corpus import Vocabulary, build_vocabulary, decode_tokens, encode_batch, load_corpus, tokenize
from ..jscc import (CompatibilityError, JsccConfig, JsccModel, Schedule, greedy_decode, jscc_encode, train,
                    write_history)
from ..metrics import BleuWeights, bleu, word_accuracy
from .config import ExperimentConfig

log = logging.getLogger(__name__)

CSV_FIELDS = ("method", "snr_db", "seed", "bleu1", "bleu2", "bleu3", "bleu4", "word_accuracy",
              "complex_symbols_per_sentence_mean", "sentences_failed")


@dataclass(frozen=True)
class SweepRow:
    method: str
    snr_db: float
    seed: int
    bleu1: float
    bleu2: float
    bleu3: float
    bleu4: float
    word_accuracy: float
    complex_symbols_per_sentence_mean: float
    sentences_failed: int


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    decoded: dict = field(default_factory=dict, repr=False)
    budget: dict = field(default_factory=dict)

    def sorted_rows(self) -> list[SweepRow]:
        return sorted(self.rows, key=lambda r: (r.method, r.snr_db, r.seed))

    def select(self, method: str, snr_db: float) -> list[SweepRow]:
        return [r for r in self.rows if r.method == method and r.snr_db == snr_db]


def point_seed(master_seed: int, method: str, snr_db: float, seed: int) -> int:
    """64-bit worker seed for one sweep point.

    The first 8 bytes (little-endian) of BLAKE2b-64 over
    ``u64le(master_seed) || method || 0x00 || f64le(snr_db) || i64le(seed)``.
    """
    key = struct.pack("<Q", master_seed & 0xFFFFFFFFFFFFFFFF) + method.encode() + b"\0" \
        + struct.pack("<d", snr_db) + struct.pack("<q", seed)
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def channel_for(cfg: ExperimentConfig, snr_db: float, seed: int) -> ChannelConfig:
    if cfg.channel == "awgn":
        return ChannelConfig.awgn(snr_db, seed)
    return ChannelConfig.fading(cfg.h, snr_db, seed)


def score(decoded: list[str], references: list[str]) -> dict:
    w = [BleuWeights.up_to(n) for n in (1, 2, 3, 4)]
    b = np.zeros(4)
    acc = 0.0
    failed = 0
    for cand, ref in zip(decoded, references):
        c, r = tokenize(cand), tokenize(ref)
        for i in range(4):
            b[i] += bleu(c, r, w[i])
        acc += word_accuracy(c, r)
        failed += c != r
    n = len(references)
    return {"bleu1": b[0] / n, "bleu2": b[1] / n, "bleu3": b[2] / n, "bleu4": b[3] / n,
            "word_accuracy": acc / n, "sentences_failed": failed}


# classic ---------------------------------------------------------------

def classic_codebook(train_sentences):
    return huffman_build(byte_frequencies(train_sentences))


def run_classic_point(sentences, book, rs: RsParams, ch: ChannelConfig, seed: int, dump_prefix=None):
    decoded, symbols = [], []
    for idx, s in enumerate(sentences):
        text, stats = classic_transmit_sentence(s, book, rs, ch, make_rng(seed ^ idx),
                                                keep_stages=dump_prefix is not None and idx == 0)
        if dump_prefix is not None and idx == 0:
            write_stage_dump(stats, f"{dump_prefix}.stages.txt")
        decoded.append(text)
        symbols.append(stats.complex_symbols)
    return decoded, float(np.mean(symbols))


def classic_symbol_mean(sentences, book, rs: RsParams) -> float:
    noiseless = ChannelConfig.awgn(math.inf)
    return run_classic_point(sentences, book, rs, noiseless, 0)[1]


# neural ----------------------------------------------------------------

def jscc_config_from(cfg: ExperimentConfig, vocab_size: int, channel_dim: int) -> JsccConfig:
    return JsccConfig(vocab_size=vocab_size, max_len=cfg.max_len, model_dim=cfg.model_dim,
                      heads=cfg.heads, ff_dim=cfg.ff_dim, layers=cfg.layers,
                      channel_dim_per_token=channel_dim, lambda_mi=cfg.lambda_mi,
                      train_snr_range_db=(cfg.train_snr_low, cfg.train_snr_high),
                      fading_h=cfg.fading_h, lr=cfg.lr, batch_size=cfg.batch_size,
                      unk_prob=cfg.unk_prob)


def matched_channel_dim(classic_mean: float, max_len: int) -> int:
    """Even per-token width whose symbol count is closest to the classic mean."""
    cd = max(2, 2 * round(classic_mean / max_len))
    neural = max_len * cd / 2
    if abs(neural - classic_mean) > 0.1 * classic_mean:
        raise CompatibilityError(
            f"no even channel_dim_per_token gives {classic_mean:.2f} +/- 10% complex symbols at "
            f"max_len={max_len} (closest: {cd} -> {neural:.0f})")
    return cd


def train_model(cfg: ExperimentConfig, vocab: Vocabulary, train_sentences, channel_dim: int,
                seed: int):
    jcfg = jscc_config_from(cfg, len(vocab), channel_dim)
    model = JsccModel(jcfg, seed=seed)
    ids = encode_batch(vocab, train_sentences, cfg.max_len)
    model, history = train(model, ids, Schedule.alternating(cfg.epochs_per_phase, cfg.max_rounds),
                           seed=seed)
    return model, history


def check_compatible(model: JsccModel, meta: dict, vocab: Vocabulary, cfg: ExperimentConfig,
                     channel_dim: int | None):
    problems = []
    if model.cfg.vocab_size != len(vocab):
        problems.append(f"vocab_size expected {len(vocab)}, found {model.cfg.vocab_size}")
    if "vocab" in meta and list(meta["vocab"]) != list(vocab.id_to_token):
        problems.append("vocabulary tokens differ from the eval/train corpus vocabulary")
    if model.cfg.max_len != cfg.max_len:
        problems.append(f"max_len expected {cfg.max_len}, found {model.cfg.max_len}")
    if channel_dim is not None and model.cfg.channel_dim_per_token != channel_dim:
        problems.append(f"channel_dim_per_token expected {channel_dim}, "
                        f"found {model.cfg.channel_dim_per_token}")
    if problems:
        raise CompatibilityError("checkpoint does not match the experiment: " + "; ".join(problems))


def run_neural_point(model: JsccModel, vocab: Vocabulary, sentences, ch: ChannelConfig, seed: int):
    ids = encode_batch(vocab, sentences, model.cfg.max_len)
    x = jscc_encode(model, ids)
    out = greedy_decode(model, apply_channel(x, ch, make_rng(seed)))
    return [decode_tokens(vocab, row) for row in out], x.shape[1] / 2


# driver ----------------------------------------------------------------

def _classic_task(args):
    sentences, book, rs, ch, seed, dump = args
    return run_classic_point(sentences, book, rs, ch, seed, dump)


def run_sweep(cfg: ExperimentConfig, models: dict | None = None) -> SweepResult:
    """Score every (method, snr, seed) point.

    ``models`` maps seed index to a trained :class:`JsccModel`; missing models
    are loaded from ``cfg.checkpoint`` or trained.
    """
    eval_sents = load_corpus(cfg.eval_corpus)
    train_sents = load_corpus(cfg.train_corpus)
    result = SweepResult()
    rs = RsParams(cfg.rs_n, cfg.rs_k)
    book = classic_codebook(train_sents)
    classic_mean = classic_symbol_mean(eval_sents, book, rs)
    result.budget["classic_symbols_per_sentence_mean"] = classic_mean

    vocab = build_vocabulary(train_sents, cfg.min_freq)
    channel_dim = None
    if "neural" in cfg.methods:
        if cfg.budget_mode == "matched":
            channel_dim = matched_channel_dim(classic_mean, cfg.max_len)
        else:
            channel_dim = cfg.channel_dim_per_token
        result.budget["channel_dim_per_token"] = channel_dim
        result.budget["neural_symbols_per_sentence"] = cfg.max_len * channel_dim // 2
        log.info("symbol budget: classic %.2f, neural %d complex symbols per sentence",
                 classic_mean, cfg.max_len * channel_dim // 2)

    points = [(m, snr, i, s) for m in cfg.methods for snr in cfg.snr_points_db
              for i, s in enumerate(cfg.seeds)]
    references = [" ".join(tokenize(s)) for s in eval_sents]

    outputs = {}
    classic_jobs = []
    for p in points:
        if p[0] != "classic":
            continue
        seed = point_seed(cfg.master_seed, p[0], p[1], p[3])
        dump = _dump_prefix(cfg, p) if cfg.dump_stages else None
        classic_jobs.append((p, (eval_sents, book, rs, channel_for(cfg, p[1], seed), seed, dump)))
    if cfg.threads > 1 and len(classic_jobs) > 1:
        with ProcessPoolExecutor(cfg.threads) as pool:
            for (p, _), res in zip(classic_jobs, pool.map(_classic_task, [j for _, j in classic_jobs])):
                outputs[p] = res
    else:
        for p, job in classic_jobs:
            outputs[p] = _classic_task(job)

    if "neural" in cfg.methods:
        models = dict(models or {})
        loaded = None
        for i, s in enumerate(cfg.seeds):
            if i in models:
                continue
            if cfg.checkpoint is not None:
                if loaded is None:
                    model, meta = JsccModel.load(cfg.checkpoint)
                    check_compatible(model, meta, vocab, cfg, channel_dim)
                    loaded = model
                models[i] = loaded
            else:
                model, history = train_model(cfg, vocab, train_sents, channel_dim, s)
                models[i] = model
                if cfg.out is not None:
                    model.save(f"{cfg.out}.seed{s}.ckpt", vocab)
                    write_history(history, f"{cfg.out}.seed{s}.history.csv")
        for i, model in models.items():
            check_compatible(model, {}, vocab, cfg, channel_dim)
        for p in points:
            if p[0] != "neural":
                continue
            seed = point_seed(cfg.master_seed, p[0], p[1], p[3])
            outputs[p] = run_neural_point(models[p[2]], vocab, eval_sents, channel_for(cfg, p[1], seed), seed)

    for p in points:
        decoded, sym_mean = outputs[p]
        sc = score(decoded, references)
        result.rows.append(SweepRow(p[0], p[1], p[3], sc["bleu1"], sc["bleu2"], sc["bleu3"],
                                    sc["bleu4"], sc["word_accuracy"], sym_mean, sc["sentences_failed"]))
        result.decoded[(p[0], p[1], p[3])] = decoded
    return result


def _dump_prefix(cfg: ExperimentConfig, p) -> str | None:
    if cfg.out is None:
        return None
    return f"{cfg.out}.{p[0]}_snr{_fmt_snr(p[1])}_seed{p[3]}"


def _fmt_snr(snr: float) -> str:
    return "inf" if math.isinf(snr) else f"{snr:g}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6f}"
    return str(v)


def emit_csv(result: SweepResult, path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(CSV_FIELDS)
            for r in result.sorted_rows():
                w.writerow([_fmt(getattr(r, name)) for name in CSV_FIELDS])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror}") from exc


def read_csv(path) -> list[SweepRow]:
    types = {f.name: f.type for f in fields(SweepRow)}
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for rec in csv.DictReader(f):
            vals = {}
            for k, v in rec.items():
                t = types[k]
                vals[k] = v if t == "str" else int(v) if t == "int" else float(v)
            rows.append(SweepRow(**vals))
    return rows


def write_decoded(result: SweepResult, out) -> list[Path]:
    """Decoded sentences per point, one line per input sentence.

    ``<out>.decoded.txt`` is written when the sweep has a single point;
    otherwise one ``<out>.<method>_snr<snr>_seed<seed>.decoded.txt`` per point.
    """
    paths = []
    items = sorted(result.decoded.items())
    for (method, snr, seed), lines in items:
        if len(items) == 1:
            path = Path(f"{out}.decoded.txt")
        else:
            path = Path(f"{out}.{method}_snr{_fmt_snr(snr)}_seed{seed}.decoded.txt")
        path.write_text("".join(line.replace("\n", " ") + "\n" for line in lines), encoding="utf-8")
        paths.append(path)
    return paths
