"""Transformer joint source-channel codec for sentences.

Transmitter: token embedding + sinusoidal positions -> transformer layers
(semantic encoder, partition ``beta``) -> dense/ReLU/dense per token (channel
encoder, ``alpha``) -> per-sentence power normalization. Receiver: dense/ReLU/
dense/LayerNorm per token (channel decoder, ``delta``) -> transformer layers
and a vocabulary projection (semantic decoder, ``chi``). Decoding is
position-parallel: one softmax over the vocabulary per position.

Training minimizes ``CE - lambda_mi * MINE bound`` so the bound on I(x; y) is
maximized, alternating between the channel pair {alpha, delta} and the
semantic pair {beta, chi} with the other pair frozen.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .channel import ChannelConfig, make_rng, noise_sigma
from .corpus import Vocabulary
from .mine import MineEstimator, bound_and_grad, derangement, mine_train_step
from .nnkit import (Dense, Embedding, LayerNorm, ParamSet, TransformerLayer, adam_step,
                    load_checkpoint, save_checkpoint)
from .nnkit.functional import ShapeError, cross_entropy, relu_backward, relu_forward, sinusoidal_positions

log = logging.getLogger(__name__)

PARTITIONS = ("beta", "alpha", "delta", "chi")
CHANNEL_PAIR = ("alpha", "delta")
SEMANTIC_PAIR = ("beta", "chi")


class CompatibilityError(ValueError):
    pass


class TrainingDivergedError(FloatingPointError):
    pass


@dataclass
class JsccConfig:
    vocab_size: int
    max_len: int = 16
    model_dim: int = 128
    heads: int = 8
    ff_dim: int = 512
    layers: int = 3
    channel_hidden: int = 256
    channel_dim_per_token: int = 16
    lambda_mi: float = 0.05
    train_snr_range_db: tuple[float, float] = (5.0, 10.0)
    fading_h: float = 0.9
    mine_hidden: int = 64
    mine_lr: float = 1e-3
    lr: float = 5e-4
    batch_size: int = 25
    unk_prob: float = 0.1
    mine_updates_per_batch: int = 1

    def __post_init__(self):
        if self.channel_dim_per_token % 2:
            raise ValueError("channel_dim_per_token must be even (complex pairs)")
        if self.lambda_mi < 0:
            raise ValueError("lambda_mi must be non-negative")
        if self.model_dim % self.heads:
            raise ValueError(f"model_dim {self.model_dim} not divisible by heads {self.heads}")
        lo, hi = self.train_snr_range_db
        if lo > hi:
            raise ValueError("train_snr_range_db must be [low, high]")
        self.train_snr_range_db = (float(lo), float(hi))

    @property
    def symbols_per_sentence(self) -> int:
        return self.max_len * self.channel_dim_per_token // 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["train_snr_range_db"] = list(self.train_snr_range_db)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "JsccConfig":
        d = dict(d)
        d["train_snr_range_db"] = tuple(d["train_snr_range_db"])
        return cls(**d)


class JsccModel:
    def __init__(self, cfg: JsccConfig, seed: int = 0, pad_id: int = 0, unk_id: int = 3,
                 dtype=np.float64):
        self.cfg = cfg
        self.pad_id = pad_id
        self.unk_id = unk_id
        rng = make_rng(seed)
        D, cd, hid = cfg.model_dim, cfg.channel_dim_per_token, cfg.channel_hidden
        self.beta = ParamSet("beta", dtype)
        self.alpha = ParamSet("alpha", dtype)
        self.delta = ParamSet("delta", dtype)
        self.chi = ParamSet("chi", dtype)

        self.embed = Embedding(self.beta, "beta.embed", cfg.vocab_size, D, rng)
        self.enc = [TransformerLayer(self.beta, f"beta.layer{i}", D, cfg.heads, cfg.ff_dim, rng)
                    for i in range(cfg.layers)]
        self.ce1 = Dense(self.alpha, "alpha.fc1", D, hid, rng)
        self.ce2 = Dense(self.alpha, "alpha.fc2", hid, cd, rng)
        self.cd1 = Dense(self.delta, "delta.fc1", cd, hid, rng)
        self.cd2 = Dense(self.delta, "delta.fc2", hid, D, rng)
        self.cdln = LayerNorm(self.delta, "delta.ln", D)
        self.dec = [TransformerLayer(self.chi, f"chi.layer{i}", D, cfg.heads, cfg.ff_dim, rng)
                    for i in range(cfg.layers)]
        self.out = Dense(self.chi, "chi.out", D, cfg.vocab_size, rng)
        self.pos = sinusoidal_positions(cfg.max_len, D).astype(dtype)

    @property
    def partitions(self) -> dict[str, ParamSet]:
        return {"beta": self.beta, "alpha": self.alpha, "delta": self.delta, "chi": self.chi}

    def zero_grad(self):
        for ps in self.partitions.values():
            ps.zero_grad()

    # transmitter -------------------------------------------------------
    def encoder_features(self, ids):
        """Un-normalized channel features, shape (batch, max_len * cd)."""
        ids = np.asarray(ids)
        if ids.ndim != 2 or ids.shape[1] != self.cfg.max_len:
            raise ShapeError(f"expected token batch of shape (B, {self.cfg.max_len}), got {ids.shape}")
        if ids.size and (ids.min() < 0 or ids.max() >= self.cfg.vocab_size):
            raise IndexError(f"token id outside [0, {self.cfg.vocab_size})")
        mask = ids == self.pad_id
        h = self.embed.forward(ids) + self.pos
        for layer in self.enc:
            h = layer.forward(h, mask)
        self._a1 = self.ce1.forward(h)
        z = self.ce2.forward(relu_forward(self._a1))
        return z.reshape(len(ids), -1)

    def encoder_backward(self, dz):
        dz = dz.reshape(dz.shape[0], self.cfg.max_len, -1)
        dh = self.ce1.backward(relu_backward(self._a1, self.ce2.backward(dz)))
        for layer in reversed(self.enc):
            dh = layer.backward(dh)
        self.embed.backward(dh)

    # receiver ----------------------------------------------------------
    def decoder_logits(self, y):
        y = np.asarray(y)
        expect = self.cfg.max_len * self.cfg.channel_dim_per_token
        if y.ndim != 2 or y.shape[1] != expect:
            raise ShapeError(f"expected received block of shape (B, {expect}), got {y.shape}")
        t = y.reshape(len(y), self.cfg.max_len, -1).astype(self.beta.dtype, copy=False)
        self._b1 = self.cd1.forward(t)
        h = self.cdln.forward(self.cd2.forward(relu_forward(self._b1)))
        for layer in self.dec:
            h = layer.forward(h)
        return self.out.forward(h)

    def decoder_backward(self, dlogits):
        dh = self.out.backward(dlogits)
        for layer in reversed(self.dec):
            dh = layer.backward(dh)
        dh = self.cd2.backward(self.cdln.backward(dh))
        dt = self.cd1.backward(relu_backward(self._b1, dh))
        return dt.reshape(len(dt), -1)

    # checkpointing -----------------------------------------------------
    def state(self) -> dict[str, np.ndarray]:
        out = {}
        for ps in self.partitions.values():
            out.update(ps.params)
        return out

    def save(self, path, vocab: Vocabulary | None = None, extra: dict | None = None):
        meta = {"config": self.cfg.to_dict(), "pad_id": self.pad_id, "unk_id": self.unk_id}
        if vocab is not None:
            meta["vocab"] = list(vocab.id_to_token)
        if extra:
            meta.update(extra)
        save_checkpoint(path, self.state(), meta)

    @classmethod
    def load(cls, path) -> tuple["JsccModel", dict]:
        tensors, meta = load_checkpoint(path)
        model = cls(JsccConfig.from_dict(meta["config"]), pad_id=meta.get("pad_id", 0),
                    unk_id=meta.get("unk_id", 3))
        for name, ps in model.partitions.items():
            ps.load_values({k: v for k, v in tensors.items() if k.startswith(name + ".")})
        missing = set(model.state()) - set(tensors)
        if missing:
            raise CompatibilityError(f"checkpoint lacks tensors: {sorted(missing)[:5]}")
        return model, meta


def _normalize_rows(z):
    r = np.sqrt(2.0 * np.mean(z * z, axis=1, keepdims=True))
    return z / r, r


def _normalize_rows_backward(dx, z, r):
    m = z.shape[1]
    return dx / r - z * (np.sum(dx * z, axis=1, keepdims=True) * (2.0 / m) / r ** 3)


def jscc_encode(model: JsccModel, batch) -> np.ndarray:
    """Unit-power channel symbols, shape (batch, max_len * channel_dim_per_token)."""
    z = model.encoder_features(batch).astype(np.float64)
    return _normalize_rows(z)[0]


def jscc_decode(model: JsccModel, y) -> np.ndarray:
    """Vocabulary logits of shape (batch, max_len, vocab_size)."""
    return model.decoder_logits(y)


def ce_loss(logits, targets, pad_id: int = 0) -> float:
    targets = np.asarray(targets)
    if logits.shape[:-1] != targets.shape:
        raise ShapeError(f"logits {logits.shape} do not match targets {targets.shape}")
    return cross_entropy(logits, targets, targets != pad_id)[0]


def greedy_decode(model: JsccModel, y) -> np.ndarray:
    """Per-position argmax (lowest id wins ties); positions after the first end marker become pad."""
    ids = np.argmax(jscc_decode(model, y), axis=-1)
    return truncate_at_end(ids, end_id=2, pad_id=model.pad_id)


def truncate_at_end(ids, end_id=2, pad_id=0):
    ids = np.array(ids)
    is_end = ids == end_id
    after = np.cumsum(is_end, axis=1) - is_end > 0
    ids[after] = pad_id
    return ids


@dataclass
class LossParts:
    ce: float
    mi_bound: float
    total: float


def forward_backward(model: JsccModel, ids, targets, snr_db: float, h: float,
                     rng: np.random.Generator, mine: MineEstimator | None = None,
                     lambda_mi: float | None = None, backward: bool = True,
                     perm: np.ndarray | None = None, noise: np.ndarray | None = None) -> LossParts:
    """One pass of the end-to-end loss; with ``backward`` gradients land in all partitions.

    Noise is drawn from ``rng`` unless ``noise`` (unit-variance draws) is given;
    the marginal shuffle for the MI term comes from ``perm`` or ``rng``.
    """
    lam = model.cfg.lambda_mi if lambda_mi is None else lambda_mi
    z = model.encoder_features(ids)
    x, r = _normalize_rows(z)
    if noise is None:
        noise = rng.standard_normal(x.shape)
    y = h * x + noise_sigma(snr_db) * noise
    logits = model.decoder_logits(y)
    weight = targets != model.pad_id
    ce, dlogits = cross_entropy(logits, targets, weight)

    bound = 0.0
    use_mi = mine is not None and lam > 0
    if use_mi:
        cd = model.cfg.channel_dim_per_token
        xt, yt = x.reshape(-1, cd), y.reshape(-1, cd)
        if perm is None:
            perm = derangement(len(xt), rng)
        bg = bound_and_grad(mine, xt, yt, perm, param_grads=False)
        bound = bg.bound
    total = ce - lam * bound
    if not backward:
        return LossParts(ce, bound, total)

    dy = model.decoder_backward(dlogits)
    if use_mi:
        dy = dy - lam * bg.dy.reshape(dy.shape)
    dx = h * dy
    if use_mi:
        dx = dx - lam * bg.dx.reshape(dx.shape)
    model.encoder_backward(_normalize_rows_backward(dx, z, r))
    return LossParts(ce, bound, total)


def total_loss(model: JsccModel, batch, ch: ChannelConfig, mine: MineEstimator | None,
               rng: np.random.Generator | None = None, backward: bool = False) -> float:
    """``CE - lambda_mi * bound`` for one batch over channel ``ch``.

    ``rng`` (default: seeded from ``ch.seed``) supplies the noise and the MI
    shuffle; a fresh generator with the same seed reproduces the value.
    """
    ids = np.asarray(batch)
    rng = make_rng(ch.seed) if rng is None else rng
    snr = math.inf if ch.noiseless else ch.snr_db
    return forward_backward(model, ids, ids, snr, ch.h, rng, mine, backward=backward).total


# training ------------------------------------------------------------

@dataclass
class Phase:
    name: str
    trainable: tuple[str, ...]
    epochs: int


@dataclass
class Schedule:
    """Alternating cross-training; each round runs ``phases`` in order."""
    phases: list[Phase] = field(default_factory=lambda: [
        Phase("A", CHANNEL_PAIR, 10), Phase("B", SEMANTIC_PAIR, 10)])
    max_rounds: int = 4
    tol: float = 1e-3

    @classmethod
    def alternating(cls, epochs_per_phase: int = 10, max_rounds: int = 4, tol: float = 1e-3):
        return cls([Phase("A", CHANNEL_PAIR, epochs_per_phase),
                    Phase("B", SEMANTIC_PAIR, epochs_per_phase)], max_rounds, tol)


@dataclass
class HistoryRow:
    epoch: int
    round: int
    phase: str
    ce: float
    mi_bound: float
    total: float


def _unk_noise(ids, prob, unk_id, pad_id, rng):
    if prob <= 0:
        return ids
    words = (ids != pad_id) & (ids != 1) & (ids != 2)
    hit = words & (rng.random(ids.shape) < prob)
    out = ids.copy()
    out[hit] = unk_id
    return out


def train(model: JsccModel, ids, schedule: Schedule | None = None, seed: int = 0,
          mine: MineEstimator | None = None, on_epoch=None) -> tuple[JsccModel, list[HistoryRow]]:
    """Cross-train ``model`` on the token batch ``ids`` (N, max_len)."""
    cfg = model.cfg
    schedule = schedule or Schedule()
    ids = np.asarray(ids)
    rng = make_rng(seed)
    if mine is None and cfg.lambda_mi > 0:
        mine = MineEstimator(cfg.channel_dim_per_token, cfg.mine_hidden, seed=seed + 7)
    lo, hi = cfg.train_snr_range_db
    history: list[HistoryRow] = []
    epoch = 0
    prev_round: dict[str, float] = {}
    for rnd in range(schedule.max_rounds):
        round_loss: dict[str, float] = {}
        for phase in schedule.phases:
            trainable = [model.partitions[p] for p in phase.trainable]
            frozen = [ps for name, ps in model.partitions.items() if name not in phase.trainable]
            for _ in range(phase.epochs):
                epoch += 1
                order = rng.permutation(len(ids))
                sums = np.zeros(3)
                nb = 0
                for start in range(0, len(ids), cfg.batch_size):
                    batch = ids[order[start:start + cfg.batch_size]]
                    inputs = batch
                    if "beta" in phase.trainable:
                        inputs = _unk_noise(batch, cfg.unk_prob, model.unk_id, model.pad_id, rng)
                    snr = rng.uniform(lo, hi)
                    noise = rng.standard_normal((len(batch), cfg.max_len * cfg.channel_dim_per_token))
                    if mine is not None and cfg.lambda_mi > 0:
                        x = _normalize_rows(model.encoder_features(inputs))[0]
                        y = cfg.fading_h * x + noise_sigma(snr) * noise
                        cdim = cfg.channel_dim_per_token
                        for _ in range(cfg.mine_updates_per_batch):
                            mine_train_step(mine, x.reshape(-1, cdim), y.reshape(-1, cdim),
                                            cfg.mine_lr, rng)
                    model.zero_grad()
                    parts = forward_backward(model, inputs, batch, snr, cfg.fading_h, rng, mine,
                                             noise=noise)
                    if not all(map(math.isfinite, (parts.ce, parts.mi_bound, parts.total))):
                        raise TrainingDivergedError(
                            f"non-finite loss at epoch {epoch}, batch {nb}: ce={parts.ce}, "
                            f"mi_bound={parts.mi_bound}, total={parts.total}")
                    for ps in trainable:
                        adam_step(ps, cfg.lr)
                    for ps in frozen:
                        ps.zero_grad()
                    sums += (parts.ce, parts.mi_bound, parts.total)
                    nb += 1
                ce, mi, tot = sums / nb
                row = HistoryRow(epoch, rnd, phase.name, float(ce), float(mi), float(tot))
                history.append(row)
                log.info("epoch %d round %d phase %s ce=%.4f mi=%.4f total=%.4f",
                         epoch, rnd, phase.name, ce, mi, tot)
                if on_epoch is not None:
                    on_epoch(row, model)
            round_loss[phase.name] = history[-1].total
        if prev_round and all(prev_round[k] - round_loss[k] < schedule.tol for k in round_loss):
            break
        prev_round = round_loss
    return model, history


def write_history(history: Sequence[HistoryRow], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["epoch", "round", "phase", "ce", "mi_bound", "total"])
        for r in history:
            w.writerow([r.epoch, r.round, r.phase, f"{r.ce:.6f}", f"{r.mi_bound:.6f}", f"{r.total:.6f}"])


def transmit(model: JsccModel, ids, ch: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Encode, pass through ``ch`` and greedily decode a token batch."""
    from .channel import apply_channel
    x = jscc_encode(model, ids)
    y = apply_channel(x, ch, rng)
    return greedy_decode(model, y)
