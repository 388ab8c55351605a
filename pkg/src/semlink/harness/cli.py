"""Command line entry point: ``semlink <verb> [options]``."""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from ..channel import ChannelConfig, apply_channel, make_rng
from ..classic.qam import ber_nearest_neighbor, qam64_demodulate, qam64_modulate
from ..classic.rs import RsParams
from ..corpus import build_vocabulary, load_corpus, tokenize
from ..jscc import write_history
from ..metrics import BleuWeights, bleu, word_accuracy
from ..mine import gaussian_benchmark
from .config import ConfigError, parse_config
from .sweep import (classic_codebook, classic_symbol_mean, emit_csv, matched_channel_dim, run_sweep,
                    train_model, write_decoded)

log = logging.getLogger("semlink")


def _floats(text):
    return [math.inf if p.strip() == "inf" else float(p) for p in text.split(",") if p.strip()]


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.6f}" if isinstance(v, float) else v for v in row])


def cmd_train(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg.seeds = [args.seed]
    train_sents = load_corpus(cfg.train_corpus)
    vocab = build_vocabulary(train_sents, cfg.min_freq)
    if cfg.budget_mode == "matched":
        book = classic_codebook(train_sents)
        mean = classic_symbol_mean(load_corpus(cfg.eval_corpus), book, RsParams(cfg.rs_n, cfg.rs_k))
        channel_dim = matched_channel_dim(mean, cfg.max_len)
        log.info("matched budget: classic mean %.2f symbols, channel_dim_per_token=%d", mean, channel_dim)
    else:
        channel_dim = cfg.channel_dim_per_token
    out = Path(args.out or cfg.out or "model")
    for seed in cfg.seeds:
        model, history = train_model(cfg, vocab, train_sents, channel_dim, seed)
        stem = out if len(cfg.seeds) == 1 else Path(f"{out}.seed{seed}")
        model.save(f"{stem}.ckpt", vocab, {"seed": seed})
        write_history(history, f"{stem}.history.csv")
        print(f"seed {seed}: final total loss {history[-1].total:.4f} -> {stem}.ckpt")
    return 0


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.checkpoint is not None:
        cfg.checkpoint = Path(args.checkpoint)
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out is not None:
        cfg.out = Path(args.out)
    if cfg.out is None:
        raise ConfigError("no output path: set `out` in the config or pass --out")
    result = run_sweep(cfg)
    emit_csv(result, cfg.out)
    write_decoded(result, cfg.out)
    if result.budget:
        with open(f"{cfg.out}.budget.txt", "w", encoding="utf-8") as f:
            for k, v in sorted(result.budget.items()):
                f.write(f"{k}={v}\n")
    for r in result.sorted_rows():
        print(f"{r.method:8s} snr={r.snr_db:6.1f} seed={r.seed} bleu1={r.bleu1:.4f} "
              f"symbols={r.complex_symbols_per_sentence_mean:.1f}")
    return 0


def cmd_bleu(args) -> int:
    cands = load_corpus(args.candidates) if not args.keep_blank else \
        Path(args.candidates).read_text(encoding="utf-8").splitlines()
    refs = load_corpus(args.references) if not args.keep_blank else \
        Path(args.references).read_text(encoding="utf-8").splitlines()
    if len(cands) != len(refs):
        print(f"error: {len(cands)} candidates vs {len(refs)} references", file=sys.stderr)
        return 2
    sums = np.zeros(5)
    for c, r in zip(cands, refs):
        c, r = tokenize(c), tokenize(r)
        if not r:
            continue
        sums[:4] += [bleu(c, r, BleuWeights.up_to(n)) for n in (1, 2, 3, 4)]
        sums[4] += word_accuracy(c, r)
    means = sums / max(len(refs), 1)
    names = ["bleu1", "bleu2", "bleu3", "bleu4", "word_accuracy"]
    if args.out:
        _write_rows(args.out, names, [[float(v) for v in means]])
    print(" ".join(f"{n}={v:.6f}" for n, v in zip(names, means)))
    return 0


def channel_bench(snrs, bits: int, seed: int, h: float = 1.0):
    rows = []
    for snr in snrs:
        rng = make_rng(seed)
        b = rng.integers(0, 2, size=bits - bits % 6)
        tx, _ = qam64_modulate(b)
        ch = ChannelConfig.awgn(snr, seed) if h == 1.0 else ChannelConfig.fading(h, snr, seed)
        rx = qam64_demodulate(apply_channel(tx, ch, rng), h)
        errors = int(np.count_nonzero(rx != b))
        rows.append((float(snr), b.size, errors, errors / b.size, ber_nearest_neighbor(snr)))
    return rows


def cmd_channel_bench(args) -> int:
    rows = channel_bench(_floats(args.snr), args.bits, args.seed or 0, args.h)
    header = ["snr_db", "bits", "bit_errors", "ber", "ber_nearest_neighbor"]
    if args.out:
        _write_rows(args.out, header, rows)
    for r in rows:
        print(f"snr={r[0]:5.1f} dB  ber={r[3]:.6e}  approx={r[4]:.6e}")
    return 0


def cmd_mine_bench(args) -> int:
    rows = []
    for rho in _floats(args.rho):
        res = gaussian_benchmark(rho, steps=args.steps, batch=args.batch, seed=args.seed or 0)
        rows.append((rho, res["true_mi"], res["estimate"]))
        print(f"rho={rho:.3f} true={res['true_mi']:.4f} estimate={res['estimate']:.4f}")
    if args.out:
        _write_rows(args.out, ["rho", "true_mi", "estimate"], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semlink", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    t = sub.add_parser("train", help="train the neural codec and write a checkpoint")
    t.add_argument("--config", required=True)
    t.add_argument("--out", help="checkpoint path stem")
    t.add_argument("--seed", type=int)
    t.add_argument("--threads", type=int)
    t.set_defaults(func=cmd_train)

    s = sub.add_parser("sweep", help="BLEU vs SNR for the configured links")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--seed", type=int, help="master seed")
    s.add_argument("--checkpoint")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bleu", help="score candidate sentences against references, line by line")
    b.add_argument("candidates")
    b.add_argument("references")
    b.add_argument("--out")
    b.add_argument("--keep-blank", action="store_true", help="keep blank lines for alignment")
    b.set_defaults(func=cmd_bleu)

    c = sub.add_parser("channel-bench", help="uncoded 64-QAM BER vs SNR")
    c.add_argument("--snr", default="0,3,6,9,12,15,18,21")
    c.add_argument("--bits", type=int, default=10 ** 6)
    c.add_argument("--h", type=float, default=1.0)
    c.add_argument("--out")
    c.add_argument("--seed", type=int)
    c.add_argument("--threads", type=int)
    c.set_defaults(func=cmd_channel_bench)

    m = sub.add_parser("mine-bench", help="MINE on correlated Gaussians")
    m.add_argument("--rho", default="0.9,0.0")
    m.add_argument("--steps", type=int, default=3000)
    m.add_argument("--batch", type=int, default=256)
    m.add_argument("--out")
    m.add_argument("--seed", type=int)
    m.add_argument("--threads", type=int)
    m.set_defaults(func=cmd_mine_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
