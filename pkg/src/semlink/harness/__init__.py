from .config import ConfigError, ExperimentConfig, parse_config, parse_config_text
from .sweep import SweepResult, SweepRow, emit_csv, read_csv, run_sweep

__all__ = ["ConfigError", "ExperimentConfig", "SweepResult", "SweepRow", "emit_csv", "parse_config",
           "parse_config_text", "read_csv", "run_sweep"]
