"""Closed-form information-theoretic bounds for classifiers.

The error-probability lower bound comes from solving
``(1 - Pe) * (H(Y) - I) <= 1 - 2 (Pe - 1/2)^2`` for ``Pe``.  The right-hand
side caps binary entropy at 1, which is only tight in bits, so the bound is
always evaluated after converting ``H(Y)`` and ``I`` to bits.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import PROB_FLOOR, convert, entropy
from .errors import InfeasibleError, ShapeError


def binary_entropy_bits(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def binary_entropy_ub(x):
    """Return ``(H_2(x), 1 - 2 (x - 0.5)^2)``; the first never exceeds the second."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return binary_entropy_bits(x), 1.0 - 2.0 * (x - 0.5) ** 2


@dataclass(frozen=True)
class BoundReport:
    """Lower bounds on the error probability of any classifier.

    ``h_y`` and ``mi`` are echoed in ``base``; ``a`` and both bounds are
    computed from their values in bits.
    """

    h_y: float
    mi: float
    lb_theorem: float
    lb_fano_style: float
    a: float
    base: str

    def to_dict(self):
        return asdict(self)


def error_prob_lower_bound(h_y, mi, base="bits"):
    if h_y < 0:
        raise ValueError(f"label entropy must be non-negative, got {h_y}")
    gap = convert(h_y, base, "bits") - convert(mi, base, "bits")
    a = math.sqrt((gap - 2.0) ** 2 + 4.0)
    lb = max(0.0, (2.0 + gap - a) / 4.0)
    fano = max(0.0, 1.0 - 1.0 / gap) if gap > 1.0 else 0.0
    return BoundReport(float(h_y), float(mi), min(lb, 1.0), fano, a, base)


def entropy_gap_bounds(p, p_hat):
    """Sandwich ``sum R log(1/P) <= H(P) - H(P_hat) <= sum R log(1/P_hat)`` with ``R = P - P_hat``.

    Returns ``(lower, upper, gap)`` in nats.
    """
    p = np.asarray(p, dtype=np.float64)
    p_hat = np.asarray(p_hat, dtype=np.float64)
    if p.shape != p_hat.shape:
        raise ShapeError(f"distributions over different supports: {p.shape} vs {p_hat.shape}")
    r = p - p_hat
    lower = float(np.sum(r * -np.log(np.maximum(p, PROB_FLOOR))))
    upper = float(np.sum(r * -np.log(np.maximum(p_hat, PROB_FLOOR))))
    return lower, upper, entropy(p) - entropy(p_hat)


@dataclass(frozen=True)
class SampleComplexityInputs:
    """Inputs for the two-network sample-complexity bound.

    ``l_theta``/``m_theta_bound`` are the Lipschitz constant and parameter
    norm bound of the conditional network (dimension ``m``); the ``gamma``
    fields describe the marginal network (dimension ``m_prime``).
    """

    eps: float
    delta: float
    p_floor: float
    l_gamma: float
    m_gamma_bound: float
    l_theta: float
    m_theta_bound: float
    m: int
    m_prime: int

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0 or not 0.0 < self.p_floor < 1.0:
            raise ValueError("eps and p_floor must lie in (0, 1)")
        if min(self.delta, self.l_gamma, self.m_gamma_bound, self.l_theta, self.m_theta_bound) <= 0:
            raise ValueError("delta, Lipschitz constants and norm bounds must be positive")
        if self.m < 1 or self.m_prime < 1:
            raise ValueError("parameter dimensions must be >= 1")


def sample_complexity_bound(inputs):
    """Unrounded right-hand side of the sample-size condition (natural logs)."""
    s = inputs
    denom = (
        s.delta * s.p_floor
        - 4.0 ** ((1 + s.m_prime) / s.m_prime) * s.l_gamma * s.m_gamma_bound * math.sqrt(s.m_prime)
        - 4.0 ** ((1 + s.m) / s.m) * s.l_theta * s.m_theta_bound * math.sqrt(s.m)
    )
    if denom <= 0:
        raise InfeasibleError(f"denominator base {denom:.6g} <= 0: no finite sample size achieves delta={s.delta}")
    numer = 2.0 * math.log(1.0 / s.eps) * (s.p_floor * math.log(s.p_floor)) ** 2
    return numer / denom**2


def sample_complexity(inputs):
    """Smallest integer sample size (at least 1) satisfying the bound."""
    return max(1, math.ceil(sample_complexity_bound(inputs)))


def covering_number_ub(radius, norm_bound, dim):
    if radius <= 0 or norm_bound <= 0 or dim < 1:
        raise ValueError("radius and norm_bound must be positive and dim >= 1")
    return (2.0 * norm_bound * math.sqrt(dim) / radius) ** dim


def concentration_bound(n_samples, t, p_floor, set_size):
    """Hoeffding-type tail bound on the empirical conditional cross entropy over a finite parameter set."""
    if n_samples < 1 or t < 0 or not 0.0 < p_floor < 1.0 or set_size <= 0:
        raise ValueError("need n_samples >= 1, t >= 0, p_floor in (0, 1), set_size > 0")
    value = 2.0 * set_size * math.exp(-2.0 * n_samples * t**2 / math.log(p_floor) ** 2)
    return min(1.0, value)


def label_distribution(num_classes, imbalance=None):
    """Balanced labels, or one class holding ``1 - imbalance`` and the rest sharing ``imbalance``."""
    if imbalance is None:
        return np.full(num_classes, 1.0 / num_classes)
    if not 0.0 < imbalance < 1.0 or num_classes < 2:
        raise ValueError("imbalance must lie in (0, 1) with at least two classes")
    p = np.full(num_classes, imbalance / (num_classes - 1))
    p[0] = 1.0 - imbalance
    return p


def sweep_error_bound(label_dist, points=201, base="bits"):
    """Bound reports for MI from 0 up to ``H(Y)`` on an even grid."""
    h_y = entropy(label_dist, base)
    return [error_prob_lower_bound(h_y, mi, base) for mi in np.linspace(0.0, h_y, points)]
