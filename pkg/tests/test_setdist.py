import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unionclosed.setdist import (
    BadLength,
    BadSum,
    DimensionMismatch,
    IndexOutOfRange,
    NegativeMass,
    cross_entropy,
    distribution_from_dict,
    dump_distribution,
    elements_of,
    entropy,
    kl_divergence,
    load_distribution,
    make_distribution,
    marginal,
    mask_of,
    mobius_transform,
    point_mass,
    uniform,
    union_convolve,
    union_convolve_naive,
    zeta_transform,
)

X03 = [0.3, 0.2, 0.2, 0.3]
X03_UNION = [0.09, 0.16, 0.16, 0.59]


def random_distribution(rng, n, full_support=False):
    w = rng.exponential(size=1 << n)
    if not full_support:
        w[rng.random(1 << n) < 0.3] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
    return make_distribution(n, w / math.fsum(w))


def brute_subset_sums(v):
    return [sum(v[t] for t in range(len(v)) if t & s == t) for s in range(len(v))]


class TestMasks:
    def test_mask_round_trip(self):
        assert mask_of({1}) == 1
        assert mask_of({2}) == 2
        assert mask_of({1, 2}) == 3
        assert elements_of(0b1011) == (1, 2, 4)

    def test_mask_rejects_zero_element(self):
        with pytest.raises(IndexOutOfRange):
            mask_of({0})


class TestMakeDistribution:
    def test_x03_is_valid(self):
        p = make_distribution(2, X03)
        assert p.n == 2
        assert list(p) == X03

    def test_point_mass_n1(self):
        p = make_distribution(1, [1.0, 0.0])
        assert p.support() == (0,)

    def test_negative_mass(self):
        with pytest.raises(NegativeMass):
            make_distribution(2, [0.5, 0.5, 0.5, -0.5])

    def test_tiny_negatives_clamped(self):
        p = make_distribution(1, [1.0, -1e-16])
        assert p[1] == 0.0

    def test_bad_sum_is_not_renormalized(self):
        with pytest.raises(BadSum):
            make_distribution(1, [0.5, 0.5 + 1e-9])

    @pytest.mark.parametrize("n, length", [(2, 3), (1, 4), (0, 2)])
    def test_bad_length(self, n, length):
        with pytest.raises(BadLength):
            make_distribution(n, [1.0] + [0.0] * (length - 1))

    def test_n_out_of_range(self):
        with pytest.raises(ValueError):
            make_distribution(21, [1.0])

    def test_probs_are_read_only(self):
        p = make_distribution(2, X03)
        with pytest.raises(ValueError):
            p.probs[0] = 1.0

    def test_n_zero(self):
        p = make_distribution(0, [1.0])
        assert entropy(p) == 0.0


class TestMarginal:
    def test_x03_marginals_are_half(self):
        p = make_distribution(2, X03)
        assert marginal(p, 1) == 0.5
        assert marginal(p, 2) == 0.5

    def test_point_mass_empty(self):
        assert marginal(point_mass(2, 0), 1) == 0.0

    def test_uniform(self):
        assert marginal(uniform(2), 2) == 0.5

    @pytest.mark.parametrize("i", [0, 3])
    def test_out_of_range(self, i):
        with pytest.raises(IndexOutOfRange):
            marginal(uniform(2), i)

    def test_matches_direct_count(self):
        rng = np.random.default_rng(3)
        p = random_distribution(rng, 5)
        for i in range(1, 6):
            direct = sum(p[m] for m in range(32) if m >> (i - 1) & 1)
            assert marginal(p, i) == pytest.approx(direct, abs=1e-15)


class TestMeasures:
    def test_entropy_uniform(self):
        assert entropy(uniform(2)) == pytest.approx(2.0, abs=1e-15)

    def test_entropy_point_mass(self):
        assert entropy(point_mass(2, 3)) == 0.0

    def test_entropy_x03(self):
        oracle = 0.6 * math.log2(10 / 3) + 0.4 * math.log2(5)
        assert oracle == pytest.approx(1.970951, abs=1e-6)
        assert entropy(make_distribution(2, X03)) == pytest.approx(oracle, abs=1e-12)

    def test_kl_self_is_zero(self):
        p = make_distribution(2, X03)
        assert kl_divergence(p, p) == 0.0

    def test_kl_union_against_x03(self):
        p = make_distribution(2, X03)
        q = make_distribution(2, X03_UNION)
        oracle = 0.09 * math.log2(0.09 / 0.3) + 0.32 * math.log2(0.16 / 0.2) + 0.59 * math.log2(0.59 / 0.3)
        assert oracle == pytest.approx(0.316350, abs=1e-6)
        assert kl_divergence(q, p) == pytest.approx(oracle, abs=1e-12)

    def test_kl_off_support(self):
        assert kl_divergence(point_mass(2, 1), point_mass(2, 0)) == math.inf

    def test_cross_entropy_x03(self):
        p = make_distribution(2, X03)
        q = make_distribution(2, X03_UNION)
        oracle = 0.68 * math.log2(10 / 3) + 0.32 * math.log2(5)
        assert oracle == pytest.approx(1.924154, abs=1e-6)
        assert cross_entropy(q, p) == pytest.approx(oracle, abs=1e-12)

    def test_cross_entropy_self_is_entropy(self):
        p = make_distribution(2, X03)
        assert cross_entropy(p, p) == pytest.approx(entropy(p), abs=1e-15)

    def test_cross_entropy_off_support(self):
        assert cross_entropy(point_mass(2, 1), point_mass(2, 0)) == math.inf

    def test_zero_mass_terms_ignored(self):
        # q has zero mass where p has zero mass: finite
        q = make_distribution(2, [0.5, 0.5, 0.0, 0.0])
        p = make_distribution(2, [0.25, 0.75, 0.0, 0.0])
        assert math.isfinite(kl_divergence(q, p))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kl_divergence(uniform(1), uniform(2))
        with pytest.raises(DimensionMismatch):
            cross_entropy(uniform(1), uniform(2))
        with pytest.raises(DimensionMismatch):
            union_convolve(uniform(1), uniform(2))

    def test_decomposition_identity(self):
        rng = np.random.default_rng(11)
        for n in range(1, 7):
            p = random_distribution(rng, n, full_support=True)
            q = random_distribution(rng, n)
            assert entropy(q) + kl_divergence(q, p) == pytest.approx(cross_entropy(q, p), abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_entropy_bounds_and_gibbs(self, n, seed):
        rng = np.random.default_rng(seed)
        p = random_distribution(rng, n)
        q = random_distribution(rng, n)
        assert 0.0 <= entropy(p) <= n + 1e-12
        d = kl_divergence(q, p)
        assert d == math.inf or d >= -1e-12


class TestTransforms:
    def test_zeta_n1(self):
        assert zeta_transform([2.0, 5.0]).tolist() == [2.0, 7.0]

    def test_zeta_point_mass(self):
        assert zeta_transform([1, 0, 0, 0]).tolist() == [1, 1, 1, 1]

    def test_zeta_x03(self):
        np.testing.assert_allclose(zeta_transform(X03), [0.3, 0.5, 0.5, 1.0], atol=1e-15)

    def test_mobius_n1(self):
        assert mobius_transform([2.0, 7.0]).tolist() == [2.0, 5.0]

    def test_mobius_examples(self):
        assert mobius_transform([1, 1, 1, 1]).tolist() == [1, 0, 0, 0]
        np.testing.assert_allclose(mobius_transform([0.3, 0.5, 0.5, 1.0]), X03, atol=1e-15)

    @pytest.mark.parametrize("length", [0, 3, 6])
    def test_bad_length(self, length):
        with pytest.raises(BadLength):
            zeta_transform([0.0] * length)
        with pytest.raises(BadLength):
            mobius_transform([0.0] * length)

    def test_zeta_matches_brute_force(self):
        rng = np.random.default_rng(5)
        for n in range(0, 7):
            v = rng.normal(size=1 << n).tolist()
            np.testing.assert_allclose(zeta_transform(v), brute_subset_sums(v), atol=1e-12)

    def test_input_not_mutated(self):
        v = np.array([1.0, 2.0, 3.0, 4.0])
        zeta_transform(v)
        mobius_transform(v)
        assert v.tolist() == [1.0, 2.0, 3.0, 4.0]

    @pytest.mark.parametrize("n", range(0, 13))
    def test_round_trip(self, n):
        rng = np.random.default_rng(100 + n)
        v = rng.random(1 << n)
        np.testing.assert_allclose(mobius_transform(zeta_transform(v)), v, rtol=0, atol=1e-12)


class TestUnionConvolve:
    def test_point_masses(self):
        for s in range(8):
            for t in range(8):
                q = union_convolve(point_mass(3, s), point_mass(3, t))
                assert q.support() == (s | t,)
                assert q[s | t] == 1.0

    def test_x03(self):
        p = make_distribution(2, X03)
        np.testing.assert_allclose(list(union_convolve(p, p)), X03_UNION, rtol=0, atol=1e-12)

    def test_uniform_n1(self):
        p = make_distribution(1, [0.5, 0.5])
        np.testing.assert_allclose(list(union_convolve(p, p)), [0.25, 0.75], atol=1e-15)

    def test_structural_zeros_are_exact(self):
        # support {}, {1}, {2} forces mass on {1,2} but nothing elsewhere in n=3
        p = make_distribution(3, [0.2, 0.3, 0.5, 0, 0, 0, 0, 0])
        q = union_convolve(p, p)
        assert q.support() == (0, 1, 2, 3)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_matches_naive(self, n):
        rng = np.random.default_rng(n)
        for _ in range(5):
            p, r = random_distribution(rng, n), random_distribution(rng, n)
            fast, slow = union_convolve(p, r), union_convolve_naive(p, r)
            np.testing.assert_allclose(fast.probs, slow.probs, rtol=0, atol=1e-12)
            assert fast.support() == slow.support()

    def test_zeta_characterization(self):
        rng = np.random.default_rng(21)
        for n in range(1, 9):
            p, r = random_distribution(rng, n), random_distribution(rng, n)
            lhs = zeta_transform(union_convolve(p, r).probs)
            rhs = zeta_transform(p.probs) * zeta_transform(r.probs)
            np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 7), st.integers(0, 2**32 - 1))
    def test_union_raises_marginals(self, n, seed):
        p = random_distribution(np.random.default_rng(seed), n)
        q = union_convolve(p, p)
        assert abs(math.fsum(q.probs.tolist()) - 1.0) <= 1e-12
        assert np.all(q.probs >= 0)
        for i in range(1, n + 1):
            assert marginal(q, i) >= marginal(p, i) - 1e-15


class TestFileFormat:
    def test_round_trip(self, tmp_path):
        p = make_distribution(2, X03)
        path = tmp_path / "p.json"
        dump_distribution(p, path)
        assert list(load_distribution(path)) == X03

    def test_validation_applies(self):
        with pytest.raises(BadSum):
            distribution_from_dict({"n": 1, "probs": [0.5, 0.6]})
        with pytest.raises(ValueError):
            distribution_from_dict({"probs": [1.0]})
