import math

import numpy as np
import pytest

from semlink import data_path
from semlink.harness import cli
from semlink.harness.config import ConfigError, parse_config, parse_config_text
from semlink.harness.sweep import (
    CSV_FIELDS,
    SweepResult,
    emit_csv,
    matched_channel_dim,
    point_seed,
    read_csv,
    run_sweep,
)
from semlink.jscc import CompatibilityError, JsccConfig, JsccModel

SMALL_NEURAL = """
model_dim = 16
heads = 2
ff_dim = 24
layers = 1
epochs_per_phase = 1
max_rounds = 1
budget_mode = free
channel_dim_per_token = 4
"""


@pytest.fixture
def corpus(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("a man with short hair\na woman wearing glasses\nan old man smiling\n")
    return p


def test_config_defaults(corpus):
    cfg = parse_config_text(f"eval_corpus = {corpus}")
    assert cfg.snr_points_db == [0, 3, 6, 9, 12]
    assert cfg.train_corpus == cfg.eval_corpus
    assert cfg.methods == ["classic", "neural"]
    assert (cfg.rs_n, cfg.rs_k, cfg.max_len) == (42, 30, 16)


def test_config_lists_and_paths(tmp_path):
    (tmp_path / "x.conf").write_text("# comment\neval_corpus = c.txt\nsnr_points_db = 0, 2.5, inf\nseeds=1,2\n")
    cfg = parse_config(tmp_path / "x.conf")
    assert cfg.snr_points_db == [0.0, 2.5, math.inf]
    assert cfg.seeds == [1, 2]
    assert cfg.eval_corpus == tmp_path / "c.txt"


@pytest.mark.parametrize("text,needle", [
    ("eval_corpus = a\nsnr_dbs = 1", r"x\.conf:2: unknown key 'snr_dbs'"),
    ("eval_corpus = a\neval_corpus = b", "duplicate key"),
    ("link = both", "missing required key 'eval_corpus'"),
    ("eval_corpus = a\nlink = fiber", "link must be"),
    ("eval_corpus = a\nseeds = x", "bad value for 'seeds'"),
    ("eval_corpus = a\nsnr_points_db =", "at least one SNR"),
])
def test_config_errors(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config_text(text, source="x.conf")


def test_point_seed_stable_and_distinct():
    assert point_seed(0, "classic", 3.0, 1) == point_seed(0, "classic", 3.0, 1)
    seeds = {point_seed(0, m, s, k) for m in ("classic", "neural") for s in (0.0, 3.0) for k in (0, 1)}
    assert len(seeds) == 8


def test_matched_channel_dim():
    assert matched_channel_dim(62.16, 16) == 8
    with pytest.raises(CompatibilityError):
        matched_channel_dim(3.0, 16)


def test_empty_result_csv_header_only(tmp_path):
    emit_csv(SweepResult(), tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == ",".join(CSV_FIELDS) + "\n"


def test_noiseless_classic_is_perfect(corpus, tmp_path):
    cfg = parse_config_text(f"eval_corpus = {corpus}\nlink = classic\nsnr_points_db = inf\nseeds = 0,1")
    res = run_sweep(cfg)
    assert len(res.rows) == 2
    for r in res.rows:
        assert r.bleu1 == 1.0 and r.sentences_failed == 0
        assert r.complex_symbols_per_sentence_mean > 0


def test_sweep_cardinality_and_roundtrip(corpus, tmp_path):
    cfg = parse_config_text(f"eval_corpus = {corpus}\nsnr_points_db = 0,6\nseeds = 0,1\n" + SMALL_NEURAL)
    res = run_sweep(cfg)
    assert len(res.rows) == 2 * 2 * 2
    emit_csv(res, tmp_path / "a.csv")
    back = read_csv(tmp_path / "a.csv")
    for a, b in zip(res.sorted_rows(), back):
        assert (a.method, a.seed) == (b.method, b.seed)
        for f in CSV_FIELDS[1:]:
            assert getattr(a, f) == pytest.approx(getattr(b, f), abs=1e-6)
    neural = [r for r in res.rows if r.method == "neural"]
    assert all(r.complex_symbols_per_sentence_mean == 16 * 4 / 2 for r in neural)


def test_checkpoint_mismatch_is_reported(corpus, tmp_path):
    JsccModel(JsccConfig(vocab_size=99, max_len=16, model_dim=16, heads=2, ff_dim=24, layers=1,
                         channel_dim_per_token=4), seed=0).save(tmp_path / "m.ckpt")
    cfg = parse_config_text(f"eval_corpus = {corpus}\nlink = neural\ncheckpoint = {tmp_path / 'm.ckpt'}\n"
                            + SMALL_NEURAL)
    with pytest.raises(CompatibilityError, match="vocab_size expected"):
        run_sweep(cfg)


def test_cli_sweep_byte_identical(corpus, tmp_path):
    conf = tmp_path / "s.conf"
    conf.write_text(f"eval_corpus = {corpus}\nsnr_points_db = 3\n" + SMALL_NEURAL)
    for name in ("a", "b"):
        assert cli.main(["sweep", "--config", str(conf), "--out", str(tmp_path / f"{name}.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv.classic_snr3_seed0.decoded.txt").exists()
    assert (tmp_path / "a.csv.seed0.ckpt").exists()
    assert "channel_dim_per_token=4" in (tmp_path / "a.csv.budget.txt").read_text()


def test_cli_single_point_decoded_and_train(corpus, tmp_path, capsys):
    conf = tmp_path / "s.conf"
    conf.write_text(f"eval_corpus = {corpus}\nlink = neural\nsnr_points_db = 9\n" + SMALL_NEURAL)
    assert cli.main(["train", "--config", str(conf), "--out", str(tmp_path / "m")]) == 0
    assert (tmp_path / "m.ckpt").exists() and (tmp_path / "m.history.csv").exists()
    out = tmp_path / "r.csv"
    assert cli.main(["sweep", "--config", str(conf), "--out", str(out),
                     "--checkpoint", str(tmp_path / "m.ckpt")]) == 0
    lines = (tmp_path / "r.csv.decoded.txt").read_text().splitlines()
    assert len(lines) == 3


def test_cli_bleu_and_benches(corpus, tmp_path, capsys):
    assert cli.main(["bleu", str(corpus), str(corpus), "--out", str(tmp_path / "b.csv")]) == 0
    assert "bleu1=1.000000" in capsys.readouterr().out
    assert cli.main(["channel-bench", "--snr", "18", "--bits", "60000", "--out", str(tmp_path / "c.csv")]) == 0
    assert (tmp_path / "c.csv").read_text().startswith("snr_db,bits,bit_errors,ber")
    assert cli.main(["mine-bench", "--rho", "0", "--steps", "10", "--batch", "32"]) == 0


def test_cli_config_error_exit_code(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("snr_dbs = 1\n")
    assert cli.main(["sweep", "--config", str(conf), "--out", str(tmp_path / "x.csv")]) == 2
    assert "snr_dbs" in capsys.readouterr().err


def test_bundled_corpus_present():
    assert data_path("captions_train.txt").is_file()
    rows = data_path("captions_train.txt").read_text().splitlines()
    assert len(rows) == 200
    assert np.mean([len(r.split()) for r in rows]) > 3
