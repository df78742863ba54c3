import numpy as np
import pytest
from hypothesis import given, strategies as st

from stress_mds import (
    CapacityError,
    DataError,
    Dataset,
    WeightScheme,
    get_dissimilarity,
    get_weight,
    make_lazy_provider,
    make_precomputed_provider,
)
from stress_mds.data_model import pair_from_index, pair_index, pairs_from_indices


def unit_square():
    return Dataset(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))


class TestDataset:
    def test_rejects_single_row(self):
        with pytest.raises(DataError):
            Dataset(np.array([[1.0, 2.0]]))

    def test_rejects_nan(self):
        with pytest.raises(DataError, match="row 1"):
            Dataset(np.array([[0.0], [np.nan], [1.0]]))

    def test_rejects_label_mismatch(self):
        with pytest.raises(DataError):
            Dataset(np.zeros((3, 2)), labels=["a", "b"])


class TestPairLinearization:
    def test_round_trip_exhaustive(self):
        for n in (2, 3, 7, 50):
            expected = [(i, j) for i in range(n) for j in range(i + 1, n)]
            for k, (i, j) in enumerate(expected):
                assert pair_index(i, j, n) == k
                assert pair_from_index(k, n) == (i, j)

    @given(st.integers(min_value=2, max_value=5000), st.data())
    def test_round_trip_random(self, n, data):
        k = data.draw(st.integers(min_value=0, max_value=n * (n - 1) // 2 - 1))
        i, j = pair_from_index(k, n)
        assert 0 <= i < j < n
        assert pair_index(i, j, n) == k

    def test_vectorized_matches_scalar(self):
        n = 137
        ks = np.arange(n * (n - 1) // 2)
        ii, jj = pairs_from_indices(ks, n)
        for k in ks[:: 97]:
            assert (ii[k], jj[k]) == pair_from_index(int(k), n)


class TestPrecomputedProvider:
    def test_three_four_five(self):
        ds = Dataset(np.array([[0.0, 0.0], [3.0, 4.0]]))
        provider = make_precomputed_provider(ds)
        assert provider.get(0, 1) == 5.0

    def test_unit_square_multiset(self):
        provider = make_precomputed_provider(unit_square())
        deltas = sorted(provider.get(i, j) for i in range(4) for j in range(i + 1, 4))
        assert deltas[:4] == [1.0, 1.0, 1.0, 1.0]
        assert deltas[4:] == [np.sqrt(2.0)] * 2

    def test_capacity_error_names_bytes(self, monkeypatch):
        ds = unit_square()
        def boom(*a, **k):
            raise MemoryError
        monkeypatch.setattr("stress_mds.data_model.np.empty", boom)
        with pytest.raises(CapacityError, match="48 bytes"):
            make_precomputed_provider(ds)


class TestLazyProvider:
    def test_no_quadratic_allocation(self):
        rng = np.random.default_rng(0)
        ds = Dataset(rng.normal(size=(25_000, 10)))
        provider = make_lazy_provider(ds)
        assert provider.packed is None
        assert provider.get(3, 20_000) > 0

    def test_matches_precomputed_bitwise(self):
        rng = np.random.default_rng(7)
        ds = Dataset(rng.normal(size=(40, 5)))
        pre = make_precomputed_provider(ds)
        lazy = make_lazy_provider(ds)
        for i in range(ds.n):
            for j in range(i + 1, ds.n):
                assert lazy.get(i, j) == pre.get(i, j)


class TestGetDissimilarity:
    @pytest.fixture(params=["precomputed", "lazy"])
    def provider(self, request):
        rng = np.random.default_rng(11)
        ds = Dataset(rng.normal(size=(5, 3)))
        make = make_precomputed_provider if request.param == "precomputed" else make_lazy_provider
        return make(ds), ds

    def test_symmetry(self, provider):
        p, _ = provider
        for i in range(5):
            for j in range(5):
                if i != j:
                    assert get_dissimilarity(p, i, j) == get_dissimilarity(p, j, i)

    def test_brute_force_oracle(self, provider):
        p, ds = provider
        for i in range(5):
            for j in range(i + 1, 5):
                expected = np.sqrt(((ds.features[i] - ds.features[j]) ** 2).sum())
                assert get_dissimilarity(p, i, j) == pytest.approx(expected, rel=1e-12)

    def test_identical_rows_give_zero(self):
        ds = Dataset(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))
        assert get_dissimilarity(make_lazy_provider(ds), 0, 1) == 0.0

    def test_rejects_diagonal_and_out_of_range(self, provider):
        p, _ = provider
        with pytest.raises(DataError):
            get_dissimilarity(p, 2, 2)
        with pytest.raises(DataError):
            get_dissimilarity(p, 0, 5)


class TestWeights:
    def test_uniform(self):
        assert get_weight(WeightScheme(), 7.3) == 1.0

    def test_inverse_square(self):
        assert get_weight(WeightScheme(kind="invsq"), 2.0) == 0.25

    def test_zero_delta_floored(self):
        scheme = WeightScheme(kind="invsq", epsilon_floor=1e-8)
        assert get_weight(scheme, 0.0) == pytest.approx(1e16)

    @given(st.floats(min_value=0.0, max_value=1e12, allow_nan=False))
    def test_weights_positive_finite(self, delta):
        for scheme in (WeightScheme(), WeightScheme(kind="invsq")):
            w = get_weight(scheme, delta)
            assert w > 0 and np.isfinite(w)
