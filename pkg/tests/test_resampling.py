from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_ds
from oracles import brute_neighbors
from fraudnet.errors import ConfigError, DataError
from fraudnet.resampling import (SYNTHETIC, SmoteConfig, nearest_neighbors, random_undersample,
                                 smote)


def rows_of(ds):
    return [tuple(r) + (l,) for r, l in zip(ds.features.tolist(), ds.labels.tolist())]


def check_smote_output(ds, out, k, atol=1e-9):
    """Convex-combination and neighbour checks against the brute-force oracle."""
    minority = 1 if ds.labels.sum() <= ds.n_samples - ds.labels.sum() else 0
    min_idx = np.flatnonzero(ds.labels == minority).tolist()
    pts = ds.features[min_idx].tolist()
    local = {g: i for i, g in enumerate(min_idx)}
    X = out.dataset.features
    for r in np.flatnonzero(out.kind == SYNTHETIC):
        b, nb, lam = out.base[r], out.neighbor[r], out.lam[r]
        assert 0.0 <= lam <= 1.0
        expect = ds.features[b] + lam * (ds.features[nb] - ds.features[b])
        assert np.max(np.abs(X[r] - expect)) < atol
        assert local[nb] in brute_neighbors(pts, local[b], k)
        lo = np.minimum(ds.features[b], ds.features[nb])
        hi = np.maximum(ds.features[b], ds.features[nb])
        assert np.all(X[r] >= lo) and np.all(X[r] <= hi)
        assert out.dataset.labels[r] == minority


class TestNearestNeighbors:
    def test_1d(self):
        assert nearest_neighbors(np.array([0.0, 1.0, 3.0, 10.0]), 0, 2).tolist() == [1, 2]

    def test_duplicate_point(self):
        assert nearest_neighbors(np.array([[0.0, 0], [0, 0], [5, 5]]), 0, 1).tolist() == [1]

    def test_tie_lower_index(self):
        assert nearest_neighbors(np.array([0.0, 1.0, -1.0, 1.0]), 0, 2).tolist() == [1, 2]

    def test_matches_brute_force(self):
        P = np.random.default_rng(0).normal(size=(50, 5))
        for q in range(50):
            assert nearest_neighbors(P, q, 5).tolist() == brute_neighbors(P.tolist(), q, 5)

    def test_k_too_large(self):
        with pytest.raises(ConfigError):
            nearest_neighbors(np.zeros((3, 1)), 0, 3)


class TestUndersample:
    def test_counts(self):
        ds = make_ds(np.arange(1000.0), [0] * 980 + [1] * 20)
        out = random_undersample(ds, 1).dataset
        assert (out.labels == 0).sum() == 20 and (out.labels == 1).sum() == 20

    def test_full_dataset_scale_counts(self):
        y = np.zeros(284_807, dtype=int)
        y[:492] = 1
        out = random_undersample(make_ds(np.zeros(284_807), y), 0)
        assert out.dataset.n_samples == 984 and out.dataset.labels.sum() == 492

    def test_balanced_keeps_all(self):
        ds = make_ds(np.arange(20.0), [0] * 10 + [1] * 10)
        out = random_undersample(ds, 3)
        assert sorted(out.base.tolist()) == list(range(20))

    def test_single_class(self):
        with pytest.raises(DataError):
            random_undersample(make_ds(np.arange(3.0), [0, 0, 0]), 0)

    def test_deterministic(self):
        ds = make_ds(np.arange(60.0), [0] * 50 + [1] * 10)
        assert random_undersample(ds, 8).base.tolist() == random_undersample(ds, 8).base.tolist()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 40), st.integers(1, 200), st.integers(0, 2**64 - 1))
    def test_subset_property(self, n_min, n_maj, seed):
        g = np.random.default_rng(seed % 1000)
        X = g.integers(0, 4, (n_min + n_maj, 2)).astype(float)
        ds = make_ds(X, [1] * n_min + [0] * n_maj)
        out = random_undersample(ds, seed)
        m = min(n_min, n_maj)
        assert out.dataset.labels.sum() == m and out.dataset.n_samples == 2 * m
        assert not Counter(rows_of(out.dataset)) - Counter(rows_of(ds))
        minority = 1 if n_min <= n_maj else 0
        kept = [b for b in out.base.tolist() if ds.labels[b] == minority]
        assert sorted(kept) == np.flatnonzero(ds.labels == minority).tolist()


class TestSmote:
    def test_unique_segment(self):
        ds = make_ds([[0.0, 0.0], [2.0, 2.0], [9.0, 9.0], [8.0, 9.0], [9.0, 8.0]], [1, 1, 0, 0, 0])
        out = smote(ds, SmoteConfig(k=1, seed=3, n_synthetic=1))
        row = out.dataset.features[-1]
        assert row[0] == row[1] and 0.0 <= row[0] <= 2.0
        assert out.dataset.n_samples == 6 and out.dataset.labels[-1] == 1

    def test_identical_minority_points(self):
        ds = make_ds([[1.5, -2.0]] * 4 + [[0.0, 0.0]] * 10, [1] * 4 + [0] * 10)
        out = smote(ds, SmoteConfig(k=2, seed=0))
        synth = out.dataset.features[out.kind == SYNTHETIC]
        assert synth.shape[0] == 6
        assert np.all(synth == [1.5, -2.0])

    def test_95_5_equalize(self):
        g = np.random.default_rng(1)
        ds = make_ds(g.normal(size=(100, 3)), [0] * 95 + [1] * 5)
        out = smote(ds, SmoteConfig(k=2, seed=9))
        assert (out.dataset.labels == 0).sum() == 95 and (out.dataset.labels == 1).sum() == 95
        assert (out.kind == SYNTHETIC).sum() == 90
        check_smote_output(ds, out, 2)

    def test_round_robin_covers_minority(self):
        g = np.random.default_rng(2)
        ds = make_ds(g.normal(size=(30, 2)), [0] * 23 + [1] * 7)
        out = smote(ds, SmoteConfig(k=3, seed=1))
        bases = out.base[out.kind == SYNTHETIC].tolist()
        assert set(bases) == set(np.flatnonzero(ds.labels == 1).tolist())

    def test_target_met_returns_input(self):
        ds = make_ds(np.arange(10.0), [0] * 5 + [1] * 5)
        out = smote(ds, SmoteConfig(k=2))
        assert out.dataset.equals(ds) and not out.synthetic_mask.any()

    def test_errors(self):
        ds = make_ds(np.arange(10.0), [0] * 9 + [1])
        with pytest.raises(ConfigError):
            smote(ds, SmoteConfig(k=1))
        ds = make_ds(np.arange(10.0), [0] * 7 + [1] * 3)
        with pytest.raises(ConfigError):
            smote(ds, SmoteConfig(k=3))

    def test_deterministic_with_provenance(self):
        ds = make_ds(np.random.default_rng(5).normal(size=(40, 3)), [0] * 32 + [1] * 8)
        a, b = smote(ds, SmoteConfig(k=3, seed=12)), smote(ds, SmoteConfig(k=3, seed=12))
        assert a.dataset.equals(b.dataset)
        assert a.provenance_records() == b.provenance_records()

    def test_provenance_json_fields(self):
        ds = make_ds(np.random.default_rng(5).normal(size=(12, 2)), [0] * 9 + [1] * 3)
        recs = smote(ds, SmoteConfig(k=2, seed=1)).provenance_records()
        assert recs[0] == {"kind": "original", "base": 0, "neighbor": None, "lambda": None}
        assert set(recs[-1]) == {"kind", "base", "neighbor", "lambda"} and recs[-1]["kind"] == "synthetic"

    def test_ratio_target(self):
        ds = make_ds(np.random.default_rng(0).normal(size=(110, 2)), [0] * 100 + [1] * 10)
        out = smote(ds, SmoteConfig(k=3, target=0.5, seed=0))
        assert out.dataset.labels.sum() == 50

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 30), st.integers(1, 4), st.integers(1, 8), st.integers(0, 10**6))
    def test_convexity_property(self, n_min, k, d, seed):
        if k > n_min - 1:
            return
        g = np.random.default_rng(seed)
        n_maj = n_min + int(g.integers(0, 60))
        ds = make_ds(g.normal(size=(n_min + n_maj, d)), [1] * n_min + [0] * n_maj)
        out = smote(ds, SmoteConfig(k=k, seed=seed))
        assert out.dataset.labels.sum() == n_maj
        check_smote_output(ds, out, k)
