"""Small numpy toolkit for the transformer codec and the MI critic."""
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .functional import (
    ConfigError,
    ShapeError,
    attention_backward,
    attention_forward,
    cross_entropy,
    dense_backward,
    dense_forward,
    layernorm_backward,
    layernorm_forward,
    log_softmax,
    sinusoidal_positions,
    softmax,
)
from .gradcheck import gradient_check
from .layers import Dense, Embedding, FeedForward, LayerNorm, MultiHeadAttention, TransformerLayer
from .optim import adam_step
from .params import ParamSet

__all__ = [
    "CheckpointError", "ConfigError", "Dense", "Embedding", "FeedForward", "LayerNorm",
    "MultiHeadAttention", "ParamSet", "ShapeError", "TransformerLayer", "adam_step",
    "attention_backward", "attention_forward", "cross_entropy", "dense_backward", "dense_forward",
    "gradient_check", "layernorm_backward", "layernorm_forward", "load_checkpoint", "log_softmax",
    "save_checkpoint", "sinusoidal_positions", "softmax",
]
