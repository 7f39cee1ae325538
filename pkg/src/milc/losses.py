"""Training objectives: cross entropy, its three regularised variants and milLoss.

Every objective here is a function of a ``B x C`` prediction batch.  The
``objective`` dispatcher additionally returns the exact derivative of the
scalar loss with respect to each prediction entry, which ``milc.nn`` pushes
back through the softmax.
"""

from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from .distributions import PROB_FLOOR
from .errors import NumericError

LOSS_KINDS = ("cel", "lsr", "cp", "lc", "mil")
LSR_MODES = ("smoothed", "uniform")


@dataclass(frozen=True)
class LossMetrics:
    """Scalar loss plus the information terms it is built from (nats).

    ``cond_term`` is the conditional cross entropy against the one-hot (or
    supplied) targets, ``entropy_term`` the cross entropy between the batch
    label marginal and the aggregated prediction marginal, and ``mi`` their
    difference.  ``total`` is the objective actually minimised.
    """

    total: float
    cond_term: float
    entropy_term: float
    mi: float
    loss_kind: str


def _check_eps(eps):
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"smoothing eps must lie in [0, 1), got {eps}")


def _soften(targets, eps):
    c = targets.shape[1]
    return targets * (1.0 - eps) + (1.0 - targets) * (eps / (c - 1))


def cel_loss(targets, preds):
    return dist.conditional_cross_entropy(targets, preds)


def lsr_loss(targets_onehot, preds, eps, mode="smoothed"):
    """Label-smoothing loss.

    ``mode="smoothed"`` uses targets with ``eps/(C-1)`` on every wrong class;
    ``mode="uniform"`` mixes the one-hot cross entropy with the cross entropy
    against the uniform distribution over all ``C`` classes.
    """
    _check_eps(eps)
    if mode == "smoothed":
        return dist.conditional_cross_entropy(_soften(np.asarray(targets_onehot, dtype=np.float64), eps), preds)
    if mode == "uniform":
        preds = np.asarray(preds, dtype=np.float64)
        uniform = np.full_like(preds, 1.0 / preds.shape[1])
        return (1.0 - eps) * dist.conditional_cross_entropy(targets_onehot, preds) + eps * dist.conditional_cross_entropy(
            uniform, preds
        )
    raise ValueError(f"unknown LSR mode {mode!r}")


def cp_loss(targets_onehot, preds, eps):
    """Confidence penalty: subtracts the mean prediction entropy."""
    _check_eps(eps)
    return (1.0 - eps) * dist.conditional_cross_entropy(targets_onehot, preds) - eps * dist.mean_row_entropy(preds)


def lc_loss(targets_onehot, preds, eps):
    """Label correction: adds the mean prediction entropy."""
    _check_eps(eps)
    return (1.0 - eps) * dist.conditional_cross_entropy(targets_onehot, preds) + eps * dist.mean_row_entropy(preds)


def mil_loss(targets, preds, batch_label_dist, lambda_ent):
    if lambda_ent < 0:
        raise ValueError(f"lambda_ent must be >= 0, got {lambda_ent}")
    br = dist.mi_estimate(targets, preds, batch_label_dist)
    total = br.cond_term + lambda_ent * br.entropy_term
    return LossMetrics(total, br.cond_term, br.entropy_term, br.mi, "mil")


def _ce_grad(targets, preds):
    # d/dP of mean_i sum_c -T log(max(P, floor)); zero where the floor is active
    b = preds.shape[0]
    live = preds > PROB_FLOOR
    return np.where(live, -targets / (b * np.where(live, preds, 1.0)), 0.0)


def _self_entropy_grad(preds):
    # d/dP of mean_i H(P_i, P_i) with the floored log
    b = preds.shape[0]
    live = preds > PROB_FLOOR
    return -(np.log(np.maximum(preds, PROB_FLOOR)) + live) / b


def objective(kind, labels, preds, *, lambda_ent=50.0, smoothing_eps=0.1, lsr_mode="smoothed"):
    """Evaluate loss ``kind`` on integer ``labels`` and return ``(metrics, dloss_dpreds)``.

    The label marginal for the entropy term is the empirical distribution of
    ``labels`` itself, i.e. per batch when called from a training loop.
    """
    preds = np.asarray(preds, dtype=np.float64)
    labels = np.asarray(labels)
    num_classes = preds.shape[1]
    onehot = dist.one_hot(labels, num_classes)
    label_dist = dist.empirical_label_dist(labels, num_classes)
    br = dist.mi_estimate(onehot, preds, label_dist)
    g_cond = _ce_grad(onehot, preds)

    if kind == "cel":
        total = cel_loss(onehot, preds)
        grad = g_cond
    elif kind == "lsr":
        total = lsr_loss(onehot, preds, smoothing_eps, lsr_mode)
        if lsr_mode == "smoothed":
            grad = _ce_grad(_soften(onehot, smoothing_eps), preds)
        else:
            uniform = np.full_like(preds, 1.0 / num_classes)
            grad = (1.0 - smoothing_eps) * g_cond + smoothing_eps * _ce_grad(uniform, preds)
    elif kind in ("cp", "lc"):
        sign = -1.0 if kind == "cp" else 1.0
        total = (cp_loss if kind == "cp" else lc_loss)(onehot, preds, smoothing_eps)
        grad = (1.0 - smoothing_eps) * g_cond + sign * smoothing_eps * _self_entropy_grad(preds)
    elif kind == "mil":
        if lambda_ent < 0:
            raise ValueError(f"lambda_ent must be >= 0, got {lambda_ent}")
        total = br.cond_term + lambda_ent * br.entropy_term
        q = dist.aggregate_marginal(preds)
        live = q > PROB_FLOOR
        g_marg = np.where(live, -label_dist / (preds.shape[0] * np.where(live, q, 1.0)), 0.0)
        grad = g_cond + lambda_ent * g_marg[None, :]
    else:
        raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")

    for name, value in (("cond_term", br.cond_term), ("entropy_term", br.entropy_term), ("total", total)):
        if not np.isfinite(value):
            raise NumericError(f"{kind} loss produced non-finite {name} = {value!r}", term=name)
    return LossMetrics(float(total), br.cond_term, br.entropy_term, br.mi, kind), grad
