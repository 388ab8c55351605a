"""Flat ``key = value`` experiment configuration.

Blank lines and lines starting with ``#`` are ignored. List values are
comma-separated. Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        out.append(math.inf if part.lower() in ("inf", "+inf") else float(part))
    return out


def _ints(text: str) -> list[int]:
    return [int(p.strip(), 0) for p in text.split(",") if p.strip()]


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    eval_corpus: Path
    train_corpus: Path | None = None
    link: str = "both"
    snr_points_db: list[float] = field(default_factory=lambda: [0.0, 3.0, 6.0, 9.0, 12.0])
    seeds: list[int] = field(default_factory=lambda: [0])
    master_seed: int = 0
    channel: str = "awgn"
    h: float = 1.0
    rs_n: int = 42
    rs_k: int = 30
    budget_mode: str = "matched"
    max_len: int = 16
    min_freq: int = 1
    channel_dim_per_token: int = 16
    model_dim: int = 128
    heads: int = 8
    ff_dim: int = 512
    layers: int = 3
    lambda_mi: float = 0.05
    lr: float = 5e-4
    batch_size: int = 25
    epochs_per_phase: int = 10
    max_rounds: int = 4
    train_snr_low: float = 5.0
    train_snr_high: float = 10.0
    fading_h: float = 0.9
    unk_prob: float = 0.1
    checkpoint: Path | None = None
    out: Path | None = None
    threads: int = 1
    dump_stages: bool = False

    def __post_init__(self):
        if not self.snr_points_db:
            raise ConfigError("snr_points_db must list at least one SNR")
        if not self.seeds:
            raise ConfigError("seeds must list at least one seed")
        if self.link not in ("neural", "classic", "both"):
            raise ConfigError(f"link must be neural, classic or both, got {self.link!r}")
        if self.budget_mode not in ("matched", "free"):
            raise ConfigError(f"budget_mode must be matched or free, got {self.budget_mode!r}")
        if self.channel not in ("awgn", "fixed_fading"):
            raise ConfigError(f"channel must be awgn or fixed_fading, got {self.channel!r}")
        if self.channel == "awgn" and self.h != 1.0:
            raise ConfigError("an awgn channel has h = 1")
        if self.train_corpus is None:
            self.train_corpus = self.eval_corpus

    @property
    def methods(self) -> list[str]:
        return ["classic", "neural"] if self.link == "both" else [self.link]


_PARSERS = {
    "eval_corpus": Path, "train_corpus": Path, "checkpoint": Path, "out": Path,
    "link": str.strip, "channel": str.strip, "budget_mode": str.strip,
    "snr_points_db": _floats, "seeds": _ints,
    "dump_stages": _bool,
}
REQUIRED = ("eval_corpus",)


def _parser_for(name: str):
    if name in _PARSERS:
        return _PARSERS[name]
    ftype = {f.name: f.type for f in fields(ExperimentConfig)}[name]
    if ftype == "int":
        return lambda s: int(s, 0)
    if ftype == "float":
        return float
    return str.strip


def parse_config_text(text: str, base_dir: Path | None = None, source: str = "<config>") -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            parsed = _parser_for(key)(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
        if isinstance(parsed, Path) and base_dir is not None and not parsed.is_absolute():
            parsed = base_dir / parsed
        values[key] = parsed
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"{source}: missing required key {key!r}")
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), path.parent, str(path))
