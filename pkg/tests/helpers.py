"""Shared generators for the test modules."""

import dataclasses

import numpy as np

from milc import nn


KINK_MARGIN = 1e-2


def _min_hidden_preactivation(params, x):
    smallest = np.inf
    for layer in params.layers[:-1]:
        z = x @ layer.weight.T + layer.bias
        smallest = min(smallest, float(np.abs(z).min()))
        x = np.maximum(z, 0)
    return smallest


def audit_instance(rng, loss_kind):
    """A random float64 network, batch and config small enough for central differences.

    Instances with a hidden pre-activation closer than ``KINK_MARGIN`` to zero
    are redrawn: a central difference straddling a relu kink measures the
    kink, not the gradient.
    """
    while True:
        params, batch, config = _draw(rng, loss_kind)
        if _min_hidden_preactivation(params, batch.inputs) > KINK_MARGIN:
            return params, batch, config


def _draw(rng, loss_kind):
    depth = int(rng.integers(1, 4))
    widths = [int(w) for w in rng.integers(2, 9, size=depth + 1)]
    b = int(rng.integers(1, 5))
    params = nn.init_params(widths, int(rng.integers(2**31)), dtype=np.float64)
    for layer in params.layers:
        # non-zero biases so relu kinks are hit away from exact zeros
        layer.bias[:] = rng.normal(0, 0.5, layer.bias.shape)
        layer.weight *= rng.uniform(0.5, 3.0)
    batch = nn.Batch(rng.normal(0, 1, (b, widths[0])), rng.integers(0, widths[-1], b))
    config = nn.TrainConfig(loss_kind=loss_kind, lambda_ent=float(rng.uniform(0, 5)),
                            smoothing_eps=float(rng.uniform(0, 0.5)))
    return params, batch, config


def gradient_relative_error(params, batch, config):
    _, grads, _ = nn.loss_and_grad(params, batch, config)
    numeric = nn.finite_difference_grads(params, batch, config)
    return nn.max_relative_error(grads, numeric)


def with_kind(config, kind):
    return dataclasses.replace(config, loss_kind=kind)
