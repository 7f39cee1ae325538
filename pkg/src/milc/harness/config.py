"""Experiment configuration and its flat ``key = value`` file format.

Example::

    dataset = mnist
    widths = 784, 64, 64, 10
    loss_kind = mil
    lambda_ent = 50
    epochs = 77
    output_dir = runs/mil

Blank lines and ``#`` comments are ignored; unknown or repeated keys are
errors.  Gaussian experiments set ``dataset = gaussian`` plus the
``gauss_*`` keys (``gauss_mu`` is a comma list, ``gauss_sigma`` either one
variance, ``n`` diagonal entries or ``n*n`` row-major entries).
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..gauss import GaussianBinaryModel, covariance_from_values
from ..nn import TrainConfig


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "mnist"
    data_dir: str = None
    gauss_q: float = 0.5
    gauss_mu: tuple = (1.0,)
    gauss_sigma: tuple = (1.0,)
    gauss_train: int = 10000
    gauss_test: int = 10000
    arch: str = "mlp"
    widths: tuple = (784, 64, 64, 10)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval_every: int = 1
    output_dir: str = "runs"
    trials: int = 1

    def __post_init__(self):
        if self.dataset not in ("mnist", "gaussian"):
            raise ConfigError(f"dataset must be 'mnist' or 'gaussian', got {self.dataset!r}")
        if self.arch != "mlp":
            raise ConfigError(f"arch {self.arch!r} is not supported; only 'mlp' is implemented")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.eval_every < 1:
            raise ConfigError("eval_every must be >= 1")
        if len(self.widths) < 2 or any(w <= 0 for w in self.widths):
            raise ConfigError(f"widths must hold at least two positive ints, got {self.widths}")
        if self.dataset == "gaussian":
            model = self.gaussian_model()
            if self.widths[0] != model.dim or self.widths[-1] != 2:
                raise ConfigError(f"gaussian data needs widths starting at {model.dim} and ending at 2, got {self.widths}")
            if self.gauss_train < 1 or self.gauss_test < 1:
                raise ConfigError("gauss_train and gauss_test must be >= 1")

    def gaussian_model(self):
        mu = np.asarray(self.gauss_mu, dtype=np.float64)
        try:
            return GaussianBinaryModel(self.gauss_q, mu, covariance_from_values(self.gauss_sigma, mu.size))
        except ValueError as exc:
            raise ConfigError(f"invalid gaussian model: {exc}") from exc

    def with_trial(self, trial):
        """Copy for trial ``trial``: seed offset by the trial index."""
        train = dataclasses.replace(self.train, seed=self.train.seed + trial)
        return dataclasses.replace(self, train=train, trials=1)

    def to_flat(self):
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "train":
                out.update(dataclasses.asdict(value))
            elif isinstance(value, tuple):
                out[f.name] = list(value)
            else:
                out[f.name] = value
        return out


def _float_tuple(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _int_tuple(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


_TOP_PARSERS = {
    "dataset": str,
    "data_dir": str,
    "gauss_q": float,
    "gauss_mu": _float_tuple,
    "gauss_sigma": _float_tuple,
    "gauss_train": int,
    "gauss_test": int,
    "arch": str,
    "widths": _int_tuple,
    "eval_every": int,
    "output_dir": str,
    "trials": int,
}
_TRAIN_PARSERS = {"learning_rate": float, "momentum": float, "batch_size": int, "epochs": int,
                  "lambda_ent": float, "smoothing_eps": float, "loss_kind": str, "seed": int, "lsr_mode": str}


def parse_config_text(text):
    top, train = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        if key in top or key in train:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _TOP_PARSERS:
                top[key] = _TOP_PARSERS[key](value)
            elif key in _TRAIN_PARSERS:
                train[key] = _TRAIN_PARSERS[key](value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    return ExperimentConfig(train=TrainConfig(**train), **top)


def load_config(path):
    return parse_config_text(Path(path).read_text())
