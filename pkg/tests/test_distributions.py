import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from milc import distributions as dist
from milc.errors import EmptyInputError


def random_simplex(rng, c, size=None):
    shape = (c,) if size is None else (size, c)
    return rng.dirichlet(np.ones(c), size=size).reshape(shape)


probability_vectors = st.integers(2, 12).flatmap(
    lambda c: arrays(np.float64, c, elements=st.floats(1e-6, 1.0))
).map(lambda v: v / v.sum())


class TestEmpiricalLabelDist:
    def test_balanced(self):
        np.testing.assert_array_equal(dist.empirical_label_dist([0, 0, 1, 1], 2), [0.5, 0.5])

    def test_single_label(self):
        np.testing.assert_array_equal(dist.empirical_label_dist([3], 4), [0, 0, 0, 1])

    def test_uniform_sample_concentrates(self):
        labels = np.random.default_rng(7).integers(0, 10, 10_000)
        p = dist.empirical_label_dist(labels, 10)
        assert np.max(np.abs(p - 0.1)) < 0.02

    def test_empty_batch(self):
        with pytest.raises(EmptyInputError):
            dist.empirical_label_dist([], 3)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            dist.empirical_label_dist([0, 5], 3)


class TestAggregateMarginal:
    def test_uniform_rows(self):
        np.testing.assert_allclose(dist.aggregate_marginal(np.full((5, 4), 0.25)), np.full(4, 0.25))

    def test_opposite_one_hots(self):
        np.testing.assert_array_equal(dist.aggregate_marginal(np.eye(2)), [0.5, 0.5])

    def test_matches_column_mean_oracle(self):
        preds = random_simplex(np.random.default_rng(1), 10, size=64)
        oracle = [sum(row[c] for row in preds) / len(preds) for c in range(10)]
        np.testing.assert_allclose(dist.aggregate_marginal(preds), oracle, rtol=0, atol=1e-12)

    @given(st.integers(1, 40), st.integers(2, 10), st.integers(0, 2**32 - 1))
    def test_output_is_a_distribution(self, b, c, seed):
        preds = random_simplex(np.random.default_rng(seed), c, size=b)
        dist.check_distribution(dist.aggregate_marginal(preds))


class TestEntropy:
    def test_uniform_ten(self):
        assert dist.entropy(np.full(10, 0.1)) == pytest.approx(math.log(10), abs=1e-12)

    def test_one_hot(self):
        assert dist.entropy([0.0, 1.0, 0.0]) == 0.0

    def test_two_point(self):
        assert dist.entropy([0.3, 0.7]) == pytest.approx(0.610864, abs=1e-6)

    def test_bits(self):
        assert dist.entropy([0.5, 0.5], base="bits") == pytest.approx(1.0, abs=1e-15)

    @given(probability_vectors)
    def test_bounds(self, p):
        h = dist.entropy(p)
        assert -1e-15 <= h <= math.log(p.size) + 1e-12


class TestCrossEntropy:
    def test_equal(self):
        assert dist.cross_entropy([0.5, 0.5], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)

    def test_point_mass_against_uniform(self):
        assert dist.cross_entropy([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)

    def test_chain_rule_with_independent_kl(self):
        rng = np.random.default_rng(3)
        p, q = random_simplex(rng, 5), random_simplex(rng, 5)
        kl = sum(pi * math.log(pi / qi) for pi, qi in zip(p, q))
        assert dist.cross_entropy(p, q) == pytest.approx(dist.entropy(p) + kl, abs=1e-12)

    @pytest.mark.parametrize("c", [2, 10, 100])
    def test_gibbs(self, c):
        rng = np.random.default_rng(c)
        for _ in range(1000):
            p, q = random_simplex(rng, c), random_simplex(rng, c)
            assert dist.cross_entropy(p, q) >= dist.entropy(p) - 1e-12
            assert dist.cross_entropy(p, p) == pytest.approx(dist.entropy(p), abs=1e-12)

    @given(probability_vectors, st.integers(0, 2**32 - 1))
    def test_chain_identity(self, p, seed):
        q = random_simplex(np.random.default_rng(seed), p.size)
        assert dist.cross_entropy(p, q) == pytest.approx(dist.entropy(p) + dist.kl_divergence(p, q), abs=1e-10)

    def test_floor_keeps_zero_q_finite(self):
        assert math.isfinite(dist.cross_entropy([0.5, 0.5], [1.0, 0.0]))


class TestConditionalCrossEntropy:
    def test_perfect_prediction(self):
        t = np.eye(3)
        assert dist.conditional_cross_entropy(t, t) < 1e-11

    def test_uniform_predictions(self):
        labels = np.random.default_rng(0).integers(0, 10, 7)
        value = dist.conditional_cross_entropy(dist.one_hot(labels, 10), np.full((7, 10), 0.1))
        assert value == pytest.approx(math.log(10), abs=1e-12)

    def test_row_by_row_oracle(self):
        rng = np.random.default_rng(11)
        targets, preds = random_simplex(rng, 4, size=3), random_simplex(rng, 4, size=3)
        per_row = [sum(t * math.log(1 / p) for t, p in zip(tr, pr)) for tr, pr in zip(targets, preds)]
        assert dist.conditional_cross_entropy(targets, preds) == pytest.approx(sum(per_row) / 3, abs=1e-12)


class TestTargets:
    def test_smoothed_rows(self):
        t = dist.smoothed_targets([2, 0], 5, 0.1)
        np.testing.assert_allclose(t[0], [0.025, 0.025, 0.9, 0.025, 0.025])
        np.testing.assert_allclose(t.sum(axis=1), 1.0)

    def test_one_hot_single_one(self):
        t = dist.one_hot([1, 3], 4)
        np.testing.assert_array_equal(t.sum(axis=1), [1, 1])
        assert t[0, 1] == t[1, 3] == 1.0


class TestMiEstimate:
    def test_independent_predictions(self):
        labels = np.arange(20) % 5
        m = dist.mi_estimate(dist.one_hot(labels, 5), np.full((20, 5), 0.2), np.full(5, 0.2))
        assert m.entropy_term == pytest.approx(math.log(5), abs=1e-12)
        assert m.cond_term == pytest.approx(math.log(5), abs=1e-12)
        assert m.mi == pytest.approx(0.0, abs=1e-12)

    def test_perfect_binary(self):
        m = dist.mi_estimate(np.eye(2), np.eye(2), [0.5, 0.5])
        assert m.entropy_term == pytest.approx(math.log(2), abs=1e-12)
        assert 0 <= m.cond_term < 1e-11
        assert m.mi == pytest.approx(math.log(2), abs=1e-11)

    @given(st.integers(1, 30), st.integers(2, 8), st.integers(0, 2**32 - 1))
    def test_mi_below_entropy_term(self, b, c, seed):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, c, b)
        m = dist.mi_estimate(dist.one_hot(labels, c), random_simplex(rng, c, size=b), dist.empirical_label_dist(labels, c))
        assert m.mi <= m.entropy_term + 1e-15
        assert m.mi == pytest.approx(m.entropy_term - m.cond_term, abs=1e-12)

    @settings(max_examples=50)
    @given(probability_vectors, st.integers(1, 20))
    def test_copies_of_one_distribution_carry_no_information(self, d, b):
        preds = np.tile(d, (b, 1))
        m = dist.mi_estimate(preds, preds, d)
        assert m.mi == pytest.approx(0.0, abs=1e-10)


def test_convert_round_trip():
    assert dist.convert(dist.convert(1.7, "nats", "bits"), "bits", "nats") == pytest.approx(1.7, abs=1e-15)
    assert dist.convert(1.0, "bits", "nats") == pytest.approx(math.log(2), abs=1e-15)
