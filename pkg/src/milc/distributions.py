"""Shannon quantities over discrete label distributions.

Label distributions are plain 1-d numpy arrays of length ``C``; prediction
batches and target encodings are ``B x C`` row-stochastic arrays.  All
functions default to nats.  Logarithm arguments are clamped below at
``PROB_FLOOR`` so saturated predictions never produce ``-inf``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, ShapeError

PROB_FLOOR = 1e-12

_LOG_BASE = {"nats": 1.0, "bits": np.log(2.0)}


def _scale(base):
    try:
        return _LOG_BASE[base]
    except KeyError:
        raise ValueError(f"unknown log base {base!r}; expected 'nats' or 'bits'") from None


def convert(value, src, dst):
    """Convert an information quantity between nats and bits."""
    return value * _scale(src) / _scale(dst)


def check_distribution(p, atol=1e-9):
    """Raise ``ValueError`` unless ``p`` (or every row of ``p``) is a distribution."""
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    sums = p.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > atol):
        raise ValueError(f"probabilities must sum to 1 (worst sum {sums.flat[np.argmax(np.abs(sums - 1.0))]!r})")
    return p


def _floored_log(q):
    return np.log(np.maximum(q, PROB_FLOOR))


def empirical_label_dist(labels, num_classes):
    """Fraction of each class among ``labels``."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EmptyInputError("cannot build a label distribution from zero labels")
    if labels.ndim != 1:
        raise ShapeError(f"labels must be 1-d, got shape {labels.shape}")
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ValueError(f"labels must lie in [0, {num_classes})")
    counts = np.bincount(labels, minlength=num_classes)
    return counts / labels.size


def aggregate_marginal(preds):
    """Model-implied label marginal: the column mean of the prediction batch.

    Each input carries empirical weight 1/B, so the marginal is the uniform
    mixture of the per-row conditionals.
    """
    preds = np.asarray(preds, dtype=np.float64)
    if preds.ndim != 2 or preds.shape[0] == 0:
        raise ShapeError(f"predictions must be a non-empty B x C array, got shape {preds.shape}")
    return preds.mean(axis=0)


def one_hot(labels, num_classes):
    labels = np.asarray(labels)
    out = np.zeros((labels.size, num_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


def smoothed_targets(labels, num_classes, eps):
    """Label-smoothed targets: ``1 - eps`` on the true class, ``eps/(C-1)`` elsewhere."""
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"smoothing eps must lie in [0, 1), got {eps}")
    if num_classes < 2:
        raise ValueError("label smoothing needs at least two classes")
    labels = np.asarray(labels)
    out = np.full((labels.size, num_classes), eps / (num_classes - 1))
    out[np.arange(labels.size), labels] = 1.0 - eps
    return out


def entropy(p, base="nats"):
    p = np.asarray(p, dtype=np.float64)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz])) / _scale(base))


def cross_entropy(p, q, base="nats"):
    """``sum_y p(y) log(1/q(y))`` with ``q`` floored inside the log."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ShapeError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    return float(-np.sum(p * _floored_log(q)) / _scale(base))


def kl_divergence(p, q, base="nats"):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ShapeError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    nz = p > 0
    return float(np.sum(p[nz] * (np.log(p[nz]) - _floored_log(q[nz]))) / _scale(base))


def conditional_cross_entropy(targets, preds, base="nats"):
    """Mean over rows of the per-row cross entropy between targets and predictions."""
    targets = np.asarray(targets, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    if targets.shape != preds.shape or preds.ndim != 2:
        raise ShapeError(f"targets {targets.shape} and predictions {preds.shape} must be equal B x C arrays")
    per_row = -np.sum(targets * _floored_log(preds), axis=1)
    return float(per_row.mean() / _scale(base))


def mean_row_entropy(preds, base="nats"):
    """Average self-entropy ``H(Q_i, Q_i)`` of the prediction rows (floored log)."""
    preds = np.asarray(preds, dtype=np.float64)
    return float(-np.sum(preds * _floored_log(preds), axis=1).mean() / _scale(base))


@dataclass(frozen=True)
class MiBreakdown:
    entropy_term: float
    cond_term: float
    mi: float


def mi_estimate(targets, preds, label_dist, base="nats"):
    """Learned mutual information: label cross entropy minus conditional cross entropy.

    The label term compares ``label_dist`` against the marginal aggregated
    from ``preds``; the conditional term compares ``targets`` row by row.
    """
    entropy_term = cross_entropy(label_dist, aggregate_marginal(preds), base)
    cond_term = conditional_cross_entropy(targets, preds, base)
    return MiBreakdown(entropy_term, cond_term, entropy_term - cond_term)
