"""Brute-force cross-checks for the fast combinatorial paths."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qident import (
    DesignMatrix,
    GeneratorSpec,
    a_nonidentifiability_witness,
    intersection_set_bruteforce,
    random_design,
    random_model,
)


class TestIntersectionBruteforce:
    def test_nested_design(self):
        q = DesignMatrix([[1, 0], [1, 1]])
        assert intersection_set_bruteforce(q, 0) == {0}
        assert intersection_set_bruteforce(q, 1) == {0, 1}

    def test_identity(self):
        q = DesignMatrix(np.eye(3, dtype=int))
        assert intersection_set_bruteforce(q, 1) == {1}

    def test_zero_column_gives_full_set(self):
        q = DesignMatrix([[1, 0], [1, 0]])
        assert intersection_set_bruteforce(q, 1) == {0, 1}

    def test_large_k_guarded(self):
        q = DesignMatrix(np.ones((1, 25), dtype=int))
        with pytest.raises(ValueError, match="brute-force"):
            intersection_set_bruteforce(q, 0)

    def test_exhaustive_small_designs(self):
        for j, k in itertools.product(range(1, 4), range(1, 3)):
            for bits in range(2 ** (j * k)):
                entries = [
                    [(bits >> (row * k + col)) & 1 for col in range(k)]
                    for row in range(j)
                ]
                q = DesignMatrix(entries)
                for factor in range(k):
                    assert intersection_set_bruteforce(q, factor) == q.intersection_set(factor)

    @settings(max_examples=60)
    @given(
        st.tuples(st.integers(1, 12), st.integers(1, 6)).flatmap(
            lambda s: arrays(np.int8, s, elements=st.integers(0, 1))
        )
    )
    def test_matches_fast_path_on_random_designs(self, entries):
        q = DesignMatrix(entries)
        for k in range(q.n_factors):
            assert intersection_set_bruteforce(q, k) == q.intersection_set(k)


class TestWitness:
    def test_full_support_column_has_trivial_witness(self, tiny_model):
        # every item loads on column 0, so there are no constraints at all
        witness = a_nonidentifiability_witness(tiny_model, 0)
        assert witness is not None
        assert np.linalg.norm(witness) > 0

    def test_single_factor_has_no_witness(self):
        spec = GeneratorSpec(n=4, j=3, k=1, seed=5)
        q = random_design(spec)
        model = random_model(spec, q)
        assert a_nonidentifiability_witness(model, 0) is None

    def test_identity_anchored_models_have_no_witness(self):
        for seed in range(5):
            spec = GeneratorSpec(n=8, j=12, k=4, seed=seed)
            q = random_design(spec)
            model = random_model(spec, q)
            for k in range(q.n_factors):
                assert q.a_identifiable(k) is True
                assert a_nonidentifiability_witness(model, k) is None

    def test_planted_masking_yields_witness(self):
        spec = GeneratorSpec(
            n=8, j=10, k=3, seed=4,
            pattern_policy="planted-masking", planted=((2, 0),),
        )
        q = random_design(spec)
        model = random_model(spec, q)
        assert q.a_identifiable(0) is False
        witness = a_nonidentifiability_witness(model, 0)
        assert witness is not None
        # the witness must actually annihilate the constraint block
        others = [kp for kp in range(3) if kp != 0]
        roots = sorted(set(range(q.n_items)) - q.support(0))
        residual = model.a[np.ix_(roots, others)] @ witness
        assert np.linalg.norm(residual) < 1e-10

    def test_agreement_with_masking_verdict(self):
        rng = np.random.default_rng(88)
        for _ in range(10):
            k = int(rng.integers(2, 5))
            cols = rng.permutation(k)
            pairs = ((int(cols[0]), int(cols[1])),)
            spec = GeneratorSpec(
                n=int(rng.integers(k + 1, 12)),
                j=k + 3 + int(rng.integers(0, 5)),
                k=k,
                seed=int(rng.integers(2**63)),
                pattern_policy="planted-masking",
                planted=pairs,
            )
            q = random_design(spec)
            model = random_model(spec, q)
            for factor in range(k):
                verdict = q.a_identifiable(factor)
                assert verdict is not None
                witness = a_nonidentifiability_witness(model, factor)
                assert (witness is not None) == (not verdict)
