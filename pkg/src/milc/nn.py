"""Dense feed-forward classifier engine.

A network is a stack of affine layers with ReLU on every layer but the
last, followed by a softmax.  Parameters live in ``float32`` by default;
softmax outputs and losses are always computed in ``float64``.
Backpropagation is written out by hand for the fixed layer structure and
covers every loss in :mod:`milc.losses`, including the batch-marginal
coupling of milLoss.
"""

from dataclasses import dataclass, field

import numpy as np

from . import losses
from .errors import ConfigError, ShapeError

ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 512
    epochs: int = 77
    lambda_ent: float = 50.0
    smoothing_eps: float = 0.1
    loss_kind: str = "cel"
    seed: int = 0
    lsr_mode: str = "smoothed"

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.momentum < 0:
            raise ConfigError(f"momentum must be >= 0, got {self.momentum}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.lambda_ent < 0:
            raise ConfigError(f"lambda_ent must be >= 0, got {self.lambda_ent}")
        if not 0.0 <= self.smoothing_eps < 1.0:
            raise ConfigError(f"smoothing_eps must lie in [0, 1), got {self.smoothing_eps}")
        if self.loss_kind not in losses.LOSS_KINDS:
            raise ConfigError(f"loss_kind must be one of {losses.LOSS_KINDS}, got {self.loss_kind!r}")
        if self.lsr_mode not in losses.LSR_MODES:
            raise ConfigError(f"lsr_mode must be one of {losses.LSR_MODES}, got {self.lsr_mode!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be unsigned, got {self.seed}")


@dataclass
class Batch:
    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels)
        if self.inputs.ndim != 2 or self.labels.ndim != 1:
            raise ShapeError("a batch needs 2-d inputs and 1-d labels")
        if self.inputs.shape[0] != self.labels.shape[0] or self.labels.shape[0] < 1:
            raise ShapeError(f"{self.inputs.shape[0]} inputs vs {self.labels.shape[0]} labels")
        if self.labels.min() < 0:
            raise ValueError("labels must be non-negative class indices")

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, index):
        return Batch(self.inputs[index], self.labels[index])


@dataclass
class Layer:
    weight: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str
    weight_velocity: np.ndarray = field(default=None, repr=False)
    bias_velocity: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.weight_velocity is None:
            self.weight_velocity = np.zeros_like(self.weight)
        if self.bias_velocity is None:
            self.bias_velocity = np.zeros_like(self.bias)
        if self.bias.shape != (self.weight.shape[0],):
            raise ShapeError(f"bias shape {self.bias.shape} does not match weight {self.weight.shape}")
        if self.weight_velocity.shape != self.weight.shape or self.bias_velocity.shape != self.bias.shape:
            raise ShapeError("momentum buffers must match parameter shapes")


@dataclass
class ModelParams:
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("a network needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.weight.shape[0] != nxt.weight.shape[1]:
                raise ShapeError(f"layer widths do not chain: {prev.weight.shape} -> {nxt.weight.shape}")

    @property
    def widths(self):
        return [self.layers[0].weight.shape[1]] + [layer.weight.shape[0] for layer in self.layers]

    @property
    def num_classes(self):
        return self.layers[-1].weight.shape[0]

    @property
    def dtype(self):
        return self.layers[0].weight.dtype

    def arrays(self):
        """Parameter arrays in the fixed update order (w0, b0, w1, b1, ...)."""
        out = []
        for layer in self.layers:
            out.extend((layer.weight, layer.bias))
        return out

    def copy(self):
        return ModelParams(
            [
                Layer(l.weight.copy(), l.bias.copy(), l.activation, l.weight_velocity.copy(), l.bias_velocity.copy())
                for l in self.layers
            ]
        )


def init_params(layer_widths, seed, dtype=np.float32):
    """Fan-in scaled uniform weights ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))``, zero biases."""
    widths = [int(w) for w in layer_widths]
    if len(widths) < 2 or any(w <= 0 for w in widths):
        raise ConfigError(f"need at least two positive layer widths, got {list(layer_widths)}")
    rng = np.random.default_rng(seed)
    layers = []
    for k, (n_in, n_out) in enumerate(zip(widths, widths[1:])):
        bound = 1.0 / np.sqrt(n_in)
        w = rng.uniform(-bound, bound, size=(n_out, n_in)).astype(dtype)
        act = "identity" if k == len(widths) - 2 else "relu"
        layers.append(Layer(w, np.zeros(n_out, dtype=dtype), act))
    return ModelParams(layers)


def softmax(logits):
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward_trace(params, x):
    if x.ndim != 2 or x.shape[1] != params.layers[0].weight.shape[1]:
        raise ShapeError(f"input shape {x.shape} does not match first layer width {params.layers[0].weight.shape[1]}")
    acts = [x.astype(params.dtype, copy=False)]
    for layer in params.layers:
        z = acts[-1] @ layer.weight.T + layer.bias
        acts.append(np.maximum(z, 0) if layer.activation == "relu" else z)
    return acts


def forward(params, batch):
    """Row-stochastic ``B x C`` predictions for a :class:`Batch` or a raw input array."""
    x = batch.inputs if isinstance(batch, Batch) else np.asarray(batch)
    return softmax(_forward_trace(params, x)[-1])


def predict_labels(preds):
    """Index of the largest probability per row; ties go to the lowest index."""
    preds = np.asarray(preds)
    if preds.ndim != 2:
        raise ShapeError(f"predictions must be 2-d, got shape {preds.shape}")
    return np.argmax(preds, axis=1)


def _loss_options(config):
    return dict(lambda_ent=config.lambda_ent, smoothing_eps=config.smoothing_eps, lsr_mode=config.lsr_mode)


def loss_value(params, batch, config):
    return losses.objective(config.loss_kind, batch.labels, forward(params, batch), **_loss_options(config))[0]


def loss_and_grad(params, batch, config):
    """Loss, exact parameter gradients and the decomposed loss terms for one batch.

    Returns ``(loss, grads, metrics)`` where ``grads`` lists ``(dW, db)`` per
    layer in the parameter dtype.
    """
    acts = _forward_trace(params, batch.inputs)
    preds = softmax(acts[-1])
    if batch.labels.max() >= params.num_classes:
        raise ValueError(f"label {batch.labels.max()} out of range for {params.num_classes} classes")
    metrics, dpreds = losses.objective(config.loss_kind, batch.labels, preds, **_loss_options(config))

    # softmax Jacobian-vector product, row by row
    dz = preds * (dpreds - np.sum(dpreds * preds, axis=1, keepdims=True))
    dz = dz.astype(params.dtype)
    grads = [None] * len(params.layers)
    for k in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[k]
        if layer.activation == "relu":
            dz = dz * (acts[k + 1] > 0)
        grads[k] = (dz.T @ acts[k], dz.sum(axis=0))
        if k > 0:
            dz = dz @ layer.weight
    return metrics.total, grads, metrics


def sgd_step(params, grads, config):
    """Classic momentum SGD, in place: ``v <- momentum*v + g``; ``theta <- theta - lr*v``."""
    if len(grads) != len(params.layers):
        raise ShapeError(f"{len(grads)} gradient pairs for {len(params.layers)} layers")
    for layer, (gw, gb) in zip(params.layers, grads):
        if gw.shape != layer.weight.shape or gb.shape != layer.bias.shape:
            raise ShapeError("gradient shapes do not match parameters")
        layer.weight_velocity *= config.momentum
        layer.weight_velocity += gw
        layer.weight -= config.learning_rate * layer.weight_velocity
        layer.bias_velocity *= config.momentum
        layer.bias_velocity += gb
        layer.bias -= config.learning_rate * layer.bias_velocity


def finite_difference_grads(params, batch, config, step=1e-4):
    """Central-difference estimate of every parameter derivative.

    Perturbs parameters in place one coordinate at a time and restores them,
    so ``params`` is unchanged on return.  Use ``float64`` parameters.
    """
    out = []
    for arr in params.arrays():
        g = np.zeros(arr.shape, dtype=np.float64)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            up = loss_value(params, batch, config).total
            flat[i] = orig - step
            down = loss_value(params, batch, config).total
            flat[i] = orig
            gflat[i] = (up - down) / (2 * step)
        out.append(g)
    return [(out[2 * k], out[2 * k + 1]) for k in range(len(params.layers))]


def max_relative_error(analytic, numeric, floor=1e-8):
    """Largest coordinate-wise ``|a - n| / max(|a|, |n|, floor)`` across gradient pairs."""
    worst = 0.0
    for pair_a, pair_n in zip(analytic, numeric):
        for a, n in zip(pair_a, pair_n):
            a = np.asarray(a, dtype=np.float64)
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
