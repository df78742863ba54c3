import numpy as np
import pytest

from stress_mds import (
    DataError,
    Dataset,
    DegeneratePairError,
    Embedding,
    WeightScheme,
    full_stress,
    make_lazy_provider,
    make_precomputed_provider,
    pair_gradient,
    sampled_stress,
)

UNIFORM = WeightScheme()
INVSQ = WeightScheme(kind="invsq")


def brute_force_stress(features, coords, scheme):
    """Independent double-loop oracle for the stress sums."""
    n = features.shape[0]
    raw = denom = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            delta = float(np.linalg.norm(features[i] - features[j]))
            d = float(np.linalg.norm(coords[i] - coords[j]))
            w = scheme.weight(delta)
            raw += w * (delta - d) ** 2
            denom += w * delta**2
    return raw, raw / denom


class TestFullStress:
    def test_exact_embedding_has_zero_stress(self):
        rng = np.random.default_rng(0)
        coords = rng.normal(size=(8, 2))
        provider = make_precomputed_provider(Dataset(coords.copy()))
        report = full_stress(provider, UNIFORM, Embedding(coords.copy()))
        assert report.raw_stress == 0.0
        assert report.normalized_stress == 0.0
        assert report.pair_count_evaluated == 28

    def test_two_points_hand_value(self):
        provider = make_precomputed_provider(Dataset(np.array([[0.0], [3.0]])))
        emb = Embedding(np.array([[0.0, 0.0], [1.0, 0.0]]))
        report = full_stress(provider, UNIFORM, emb)
        assert report.raw_stress == pytest.approx(4.0)

    @pytest.mark.parametrize("scheme", [UNIFORM, INVSQ], ids=["uniform", "invsq"])
    @pytest.mark.parametrize("mode", ["precomputed", "lazy"])
    def test_matches_brute_force_oracle(self, scheme, mode):
        rng = np.random.default_rng(5)
        feats = rng.normal(size=(6, 4))
        coords = rng.normal(size=(6, 2))
        make = make_precomputed_provider if mode == "precomputed" else make_lazy_provider
        provider = make(Dataset(feats))
        report = full_stress(provider, scheme, Embedding(coords))
        raw, norm = brute_force_stress(feats, coords, scheme)
        assert report.raw_stress == pytest.approx(raw, rel=1e-12)
        assert report.normalized_stress == pytest.approx(norm, rel=1e-12)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(9)
        provider = make_precomputed_provider(Dataset(rng.normal(size=(12, 6))))
        coords = rng.normal(size=(12, 2))
        base = full_stress(provider, UNIFORM, Embedding(coords)).raw_stress
        shifted = full_stress(provider, UNIFORM, Embedding(coords + [13.0, -4.5])).raw_stress
        theta = 1.234
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        rotated = full_stress(provider, UNIFORM, Embedding(coords @ rot.T)).raw_stress
        reflected = full_stress(provider, UNIFORM, Embedding(coords * [-1.0, 1.0])).raw_stress
        for other in (shifted, rotated, reflected):
            assert other == pytest.approx(base, rel=1e-12)

    def test_dimension_mismatch(self):
        provider = make_precomputed_provider(Dataset(np.zeros((4, 2)) + np.arange(4)[:, None]))
        with pytest.raises(DataError):
            full_stress(provider, UNIFORM, Embedding(np.zeros((5, 2))))


class TestSampledStress:
    def test_exhaustive_sample_equals_full(self):
        rng = np.random.default_rng(2)
        provider = make_precomputed_provider(Dataset(rng.normal(size=(9, 3))))
        emb = Embedding(rng.normal(size=(9, 2)))
        every_pair = np.arange(provider.n_pairs)
        est = sampled_stress(provider, UNIFORM, emb, provider.n_pairs, 0,
                             _pair_indices=every_pair)
        exact = full_stress(provider, UNIFORM, emb)
        assert est.raw_stress == pytest.approx(exact.raw_stress, rel=1e-12)

    def test_zero_stress_embedding_estimates_zero(self):
        rng = np.random.default_rng(3)
        coords = rng.normal(size=(15, 2))
        provider = make_precomputed_provider(Dataset(coords.copy()))
        est = sampled_stress(provider, UNIFORM, Embedding(coords.copy()), 50, 123)
        assert est.raw_stress == 0.0

    def test_reproducible_given_seed(self):
        rng = np.random.default_rng(4)
        provider = make_lazy_provider(Dataset(rng.normal(size=(30, 4))))
        emb = Embedding(rng.normal(size=(30, 2)))
        a = sampled_stress(provider, UNIFORM, emb, 200, 77)
        b = sampled_stress(provider, UNIFORM, emb, 200, 77)
        assert a == b

    def test_statistical_accuracy(self):
        rng = np.random.default_rng(6)
        provider = make_precomputed_provider(Dataset(rng.normal(size=(100, 5))))
        emb = Embedding(rng.normal(size=(100, 2)))
        exact = full_stress(provider, UNIFORM, emb).raw_stress
        within = sum(
            abs(sampled_stress(provider, UNIFORM, emb, 100_000, seed).raw_stress - exact)
            <= 0.05 * exact
            for seed in range(20)
        )
        assert within >= 19


class TestPairGradient:
    def test_satisfied_pair_has_zero_gradient(self):
        gi, gj = pair_gradient(1.0, 1.0, np.array([0.0, 0.0]), np.array([1.0, 0.0]))
        assert np.allclose(gi, 0.0) and np.allclose(gj, 0.0)

    def test_hand_value(self):
        gi, gj = pair_gradient(3.0, 1.0, np.array([0.0, 0.0]), np.array([1.0, 0.0]))
        assert gi == pytest.approx([4.0, 0.0])
        assert gj == pytest.approx([-4.0, 0.0])

    def test_antisymmetry_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            xi, xj = rng.normal(size=(2, 3))
            gi, gj = pair_gradient(rng.uniform(0.1, 5), rng.uniform(0.1, 5), xi, xj)
            assert np.array_equal(gj, -gi)

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(10)
        h = 1e-6
        for _ in range(100):
            delta = rng.uniform(0.1, 5.0)
            w = rng.uniform(0.1, 5.0)
            xi, xj = rng.normal(size=(2, 2)) * 2.0

            def term(a, b):
                d = np.linalg.norm(a - b)
                return w * (delta - d) ** 2

            gi, gj = pair_gradient(delta, w, xi, xj)
            for c in range(2):
                e = np.zeros(2)
                e[c] = h
                fd_i = (term(xi + e, xj) - term(xi - e, xj)) / (2 * h)
                fd_j = (term(xi, xj + e) - term(xi, xj - e)) / (2 * h)
                assert gi[c] == pytest.approx(fd_i, rel=1e-5, abs=1e-7)
                assert gj[c] == pytest.approx(fd_j, rel=1e-5, abs=1e-7)

    def test_coincident_points_rejected(self):
        with pytest.raises(DegeneratePairError):
            pair_gradient(1.0, 1.0, np.array([1.0, 1.0]), np.array([1.0, 1.0]))
