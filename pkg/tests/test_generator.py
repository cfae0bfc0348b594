"""Seeded instance generation and the decaying-columns demonstration."""

import math

import numpy as np
import pytest

from qident import (
    DesignMatrix,
    GeneratorSpec,
    decay_example,
    decay_stats,
    random_design,
    random_model,
)
from qident.generator import default_split, min_rows_for_model


def masking_relation(q: DesignMatrix) -> set[tuple[int, int]]:
    k = q.n_factors
    return {
        (a, b) for a in range(k) for b in range(k) if a != b and q.masks(a, b)
    }


class TestSpecValidation:
    def test_positive_dimensions_required(self):
        with pytest.raises(ValueError):
            GeneratorSpec(n=0, j=2, k=1)

    def test_unknown_policy_rejected(self):
        with pytest.raises(ValueError, match="policy"):
            GeneratorSpec(n=2, j=2, k=1, pattern_policy="whatever")

    def test_planted_pairs_need_planted_policy(self):
        with pytest.raises(ValueError, match="planted"):
            GeneratorSpec(n=2, j=2, k=2, planted=((0, 1),))

    def test_planted_pairs_validated(self):
        with pytest.raises(ValueError, match="distinct"):
            GeneratorSpec(n=2, j=2, k=2, pattern_policy="planted-masking", planted=((1, 1),))
        with pytest.raises(ValueError, match="out of range"):
            GeneratorSpec(n=2, j=2, k=2, pattern_policy="planted-masking", planted=((0, 5),))


class TestRandomDesign:
    def test_identity_anchored_square_is_identity(self):
        spec = GeneratorSpec(n=4, j=3, k=3, seed=1)
        np.testing.assert_array_equal(
            random_design(spec).entries, np.eye(3, dtype=np.int8)
        )

    def test_identity_anchored_prefix_and_no_masking(self):
        spec = GeneratorSpec(n=8, j=12, k=4, seed=5)
        q = random_design(spec)
        np.testing.assert_array_equal(q.entries[:4], np.eye(4, dtype=np.int8))
        assert masking_relation(q) == set()

    def test_identity_anchored_supports_models(self):
        for seed in range(5):
            spec = GeneratorSpec(n=10, j=15, k=4, seed=seed)
            q = random_design(spec)
            for pattern, items in q.realized_patterns().items():
                assert len(items) >= len(pattern)

    def test_planted_single_pair_strict_containment(self):
        spec = GeneratorSpec(
            n=4, j=6, k=2, seed=3, pattern_policy="planted-masking", planted=((1, 0),)
        )
        q = random_design(spec)
        assert q.support(1) < q.support(0)
        assert masking_relation(q) == {(1, 0)}

    def test_planted_relation_is_exact(self):
        planted = ((2, 0), (1, 0))
        spec = GeneratorSpec(
            n=5, j=10, k=4, seed=9, pattern_policy="planted-masking", planted=planted
        )
        q = random_design(spec)
        assert masking_relation(q) == set(planted)

    def test_planted_mutual_pair_gives_equal_supports(self):
        spec = GeneratorSpec(
            n=4, j=8, k=3, seed=2,
            pattern_policy="planted-masking", planted=((0, 1), (1, 0)),
        )
        q = random_design(spec)
        assert q.support(0) == q.support(1)
        assert masking_relation(q) == {(0, 1), (1, 0)}

    def test_non_closed_plant_is_infeasible(self):
        spec = GeneratorSpec(
            n=4, j=10, k=3, seed=2,
            pattern_policy="planted-masking", planted=((2, 1), (1, 0)),
        )
        with pytest.raises(ValueError, match="transitivity"):
            random_design(spec)

    def test_closed_chain_accepted(self):
        spec = GeneratorSpec(
            n=4, j=10, k=3, seed=2,
            pattern_policy="planted-masking", planted=((2, 1), (1, 0), (2, 0)),
        )
        q = random_design(spec)
        assert masking_relation(q) == {(2, 1), (1, 0), (2, 0)}

    def test_too_few_rows_for_plant(self):
        spec = GeneratorSpec(
            n=4, j=1, k=2, seed=0, pattern_policy="planted-masking", planted=((1, 0),)
        )
        with pytest.raises(ValueError, match="too small"):
            random_design(spec)

    def test_uniform_seed_reproducible(self):
        spec = GeneratorSpec(n=4, j=20, k=5, seed=77, pattern_policy="uniform-random")
        first = random_design(spec).entries
        second = random_design(spec).entries
        np.testing.assert_array_equal(first, second)
        other = random_design(
            GeneratorSpec(n=4, j=20, k=5, seed=78, pattern_policy="uniform-random")
        ).entries
        assert not np.array_equal(first, other)

    def test_min_rows_helper(self):
        assert min_rows_for_model(GeneratorSpec(n=2, j=9, k=4)) == 4
        spec = GeneratorSpec(
            n=2, j=9, k=3, pattern_policy="planted-masking", planted=((1, 0),)
        )
        # patterns {0}, {1,0}, {2} need 1 + 2 + 1 rows
        assert min_rows_for_model(spec) == 4


class TestRandomModel:
    def test_assumptions_hold_by_construction(self):
        for seed in range(5):
            spec = GeneratorSpec(n=9, j=14, k=4, seed=seed)
            q = random_design(spec)
            model = random_model(spec, q)
            assert model.check_assumptions().overall

    def test_exact_zeros_outside_support(self):
        spec = GeneratorSpec(n=6, j=9, k=3, seed=11)
        q = random_design(spec)
        model = random_model(spec, q)
        assert (model.a[q.entries == 0] == 0.0).all()

    def test_single_factor(self):
        spec = GeneratorSpec(n=3, j=2, k=1, seed=0)
        q = random_design(spec)
        assert random_model(spec, q).check_assumptions().overall

    def test_rejects_undersized_patterns(self):
        spec = GeneratorSpec(n=4, j=1, k=2, seed=0)
        with pytest.raises(ValueError, match="incompatible"):
            random_model(spec, DesignMatrix([[1, 1]]))

    def test_rejects_too_few_score_rows(self):
        spec = GeneratorSpec(n=1, j=2, k=2, seed=0)
        with pytest.raises(ValueError, match="n=1"):
            random_model(spec, DesignMatrix([[1, 0], [0, 1]]))

    def test_seed_reproducible(self):
        spec = GeneratorSpec(n=6, j=9, k=3, seed=123)
        q = random_design(spec)
        np.testing.assert_array_equal(
            random_model(spec, q).theta, random_model(spec, q).theta
        )


class TestDecayExample:
    def test_smallest_cases(self):
        assert decay_example(1).tolist() == [[0.0, 1.0]]
        assert decay_example(2).tolist() == [[0.0, 1.0], [0.5, 0.0]]

    def test_four_rows(self):
        expected = [[0.0, 1.0], [0.5, 0.0], [0.0, 1.0 / 3.0], [0.25, 0.0]]
        assert decay_example(4).tolist() == expected

    def test_columns_disjoint_and_independent(self):
        for n in (2, 7, 50):
            b = decay_example(n)
            assert not (b[:, 0] * b[:, 1]).any()
            assert np.linalg.matrix_rank(b) == 2


class TestDecayStats:
    def test_two_rows_hand_svd(self):
        stats = decay_stats(2, m=1)
        assert stats.sigma_min == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), abs=1e-12)
        assert stats.frobenius_sq == pytest.approx(0.625, abs=1e-12)

    def test_hundred_rows_partial_sum_oracle(self):
        harmonic_sq = sum(1.0 / j**2 for j in range(1, 101))
        stats = decay_stats(100)
        assert stats.frobenius_sq == pytest.approx(harmonic_sq / 100.0, abs=1e-12)
        assert stats.sigma_min <= math.sqrt(stats.frobenius_sq)
        assert math.sqrt(stats.frobenius_sq) == pytest.approx(0.12787, abs=1e-5)

    def test_bound_formula(self):
        stats = decay_stats(10_000, m=100)
        assert stats.upper_bound == pytest.approx(0.02 + 1.98e-4, abs=1e-15)
        assert stats.frobenius_sq <= stats.upper_bound

    def test_default_split(self):
        assert default_split(2) == 1
        assert default_split(10) == 4
        assert default_split(100) == 10
        assert default_split(10_000) == 100

    def test_split_validated(self):
        with pytest.raises(ValueError):
            decay_stats(10, m=10)
        with pytest.raises(ValueError):
            decay_stats(1)

    def test_sigma_min_decays_while_columns_stay_independent(self):
        values = [decay_stats(n).sigma_min for n in (10, 100, 1000, 10_000)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 0.02
