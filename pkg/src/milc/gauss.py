"""Binary Gaussian classification model and its information-theoretic audit.

Labels ``y in {-1, +1}`` with ``P(y = -1) = q``; features
``x | y ~ N(y * mu, Sigma)``.  At the sampler boundary labels are remapped to
``{0, 1}`` (class 0 is ``y = -1``) so the model feeds the categorical
classifier stack directly.

Mutual information is in nats unless stated otherwise.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import expit, ndtr

from .bounds import error_prob_lower_bound
from .errors import ShapeError
from .nn import Batch

QUAD_SHIFTS = ("none", "minus_mu", "plus_mu")


@dataclass(frozen=True, eq=False)
class GaussianBinaryModel:
    q: float
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=np.float64))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=np.float64))
        if mu.ndim != 1 or sigma.shape != (mu.size, mu.size):
            raise ShapeError(f"mu has shape {mu.shape} but sigma has shape {sigma.shape}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if not np.allclose(sigma, sigma.T, atol=1e-9, rtol=0):
            raise ValueError("sigma must be symmetric")
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise ValueError("sigma must be positive definite") from None
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self):
        return self.mu.size

    @cached_property
    def chol(self):
        return np.linalg.cholesky(self.sigma)

    @cached_property
    def sigma_inv(self):
        return np.linalg.inv(self.sigma)

    @cached_property
    def log_det_sigma(self):
        return 2.0 * float(np.sum(np.log(np.diag(self.chol))))

    @cached_property
    def mahalanobis(self):
        """``mu^T Sigma^{-1} mu``."""
        return float(self.mu @ np.linalg.solve(self.sigma, self.mu))

    @cached_property
    def label_entropy(self):
        q = self.q
        return -q * math.log(q) - (1.0 - q) * math.log(1.0 - q)

    def to_dict(self):
        return {"q": self.q, "mu": self.mu.tolist(), "sigma": self.sigma.tolist()}


def covariance_from_values(values, n):
    """Covariance from one variance, ``n`` diagonal entries or ``n*n`` row-major entries."""
    s = np.asarray(values, dtype=np.float64).ravel()
    if s.size == 1:
        return np.eye(n) * s[0]
    if s.size == n:
        return np.diag(s)
    if s.size == n * n:
        return s.reshape(n, n)
    raise ShapeError(f"covariance needs 1, {n} or {n * n} values, got {s.size}")


def sample(model, count, seed):
    """Draw ``count`` labelled points; returns a :class:`~milc.nn.Batch` with labels in ``{0, 1}``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    positive = rng.random(count) >= model.q
    signs = np.where(positive, 1.0, -1.0)
    z = rng.standard_normal((count, model.dim))
    x = signs[:, None] * model.mu[None, :] + z @ model.chol.T
    return Batch(x, positive.astype(np.int64))


def mi_bounds(model):
    """``(2 min(q, 1-q) m, 4 q (1-q) m)`` with ``m`` the Mahalanobis term.

    The upper value is a genuine Jensen bound.  The lower value can exceed
    the true mutual information (it does at ``q = 0.5, mu = sigma = 1``), so
    treat it as reported, not guaranteed.
    """
    m = model.mahalanobis
    return 2.0 * min(model.q, 1.0 - model.q) * m, 4.0 * model.q * (1.0 - model.q) * m


def quadratic_form_expectation(a, mu, sigma, shift="none"):
    """``E[(X + s)^T A (X + s)]`` for ``X ~ N(mu, Sigma)`` and ``s`` in ``{0, -mu, +mu}``."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=np.float64))
    n = mu.size
    if a.shape != (n, n) or sigma.shape != (n, n):
        raise ShapeError(f"A {a.shape}, Sigma {sigma.shape} and mu {mu.shape} disagree")
    trace = float(np.trace(a @ sigma))
    mean_term = float(mu @ a @ mu)
    if shift == "none":
        return trace + mean_term
    if shift == "minus_mu":
        return trace
    if shift == "plus_mu":
        return trace + 4.0 * mean_term
    raise ValueError(f"shift must be one of {QUAD_SHIFTS}, got {shift!r}")


def posterior_logit(model, x):
    """``log P(y=+1|x) - log P(y=-1|x) = 2 mu^T Sigma^{-1} x + log((1-q)/q)``."""
    x = np.asarray(x, dtype=np.float64)
    w = 2.0 * np.linalg.solve(model.sigma, model.mu)
    return x @ w + math.log((1.0 - model.q) / model.q)


def posterior(model, x):
    """Exact ``P(Y = +1 | x)``; ``x`` may be one point or a batch of rows."""
    return expit(posterior_logit(model, x))


def _bernoulli_entropy_from_logit(logit):
    # H(sigmoid(l)) = log(1 + e^l) - sigmoid(l) * l, stable for large |l|
    return np.logaddexp(0.0, logit) - expit(logit) * logit


def mc_mutual_information(model, n_draws, seed):
    """Monte-Carlo ``H(Y) - E_x[H(Y | x)]`` with the standard error of the mean."""
    if n_draws < 1000:
        raise ValueError("n_draws must be >= 1000")
    batch = sample(model, n_draws, seed)
    cond = _bernoulli_entropy_from_logit(posterior_logit(model, batch.inputs))
    estimate = model.label_entropy - float(cond.mean())
    std_err = float(cond.std(ddof=1) / math.sqrt(n_draws))
    return estimate, std_err


def model_error_prob_lb(model):
    """Error-probability lower bound with the MI replaced by its upper bound (bits inside)."""
    _, mi_upper = mi_bounds(model)
    return error_prob_lower_bound(model.label_entropy, mi_upper, base="nats").lb_theorem


def bayes_error(model):
    """Exact Bayes error of a one-dimensional model via the normal CDF."""
    if model.dim != 1:
        raise ValueError("bayes_error supports one-dimensional models only")
    mu = abs(float(model.mu[0]))
    s = math.sqrt(float(model.sigma[0, 0]))
    q = model.q
    if mu == 0.0:
        return min(q, 1.0 - q)
    # predict +1 (for mu > 0) when x exceeds the threshold where the posterior is 1/2
    t = -s**2 * math.log((1.0 - q) / q) / (2.0 * mu)
    miss_neg = 1.0 - ndtr((t + mu) / s)
    miss_pos = ndtr((t - mu) / s)
    return float(q * miss_neg + (1.0 - q) * miss_pos)


def audit(model, n_draws, seed):
    """Bound-vs-Monte-Carlo comparison as a JSON-ready dict."""
    lower, upper = mi_bounds(model)
    est, se = mc_mutual_information(model, n_draws, seed)
    out = {
        "model": model.to_dict(),
        "mi_lower": lower,
        "mi_upper": upper,
        "mi_mc": est,
        "mi_mc_stderr": se,
        "h_y": model.label_entropy,
        "error_lb": model_error_prob_lb(model),
        "lower_bound_exceeds_mc": bool(lower > est + 3.0 * se),
    }
    if model.dim == 1:
        out["bayes_error"] = bayes_error(model)
    return out
