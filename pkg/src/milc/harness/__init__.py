"""Experiment orchestration: data loading, training runs, bound audits and figures."""

from .config import ExperimentConfig, load_config, parse_config_text
from .data import load_mnist, read_idx, write_idx
from .train import EpochMetrics, evaluate, run_experiment, train_classifier

__all__ = [
    "EpochMetrics",
    "ExperimentConfig",
    "evaluate",
    "load_config",
    "load_mnist",
    "parse_config_text",
    "read_idx",
    "run_experiment",
    "train_classifier",
    "write_idx",
]
