import numpy as np
import pytest

from conftest import make_ds
from oracles import pearson_pair, sorted_interp_quantile
from fraudnet.analysis import class_feature_summary, label_distribution, pearson_correlation
from fraudnet.data import SyntheticConfig, synthesize
from fraudnet.errors import DataError


def test_self_and_negative_correlation():
    cm = pearson_correlation(make_ds([[1.0, 6.0], [2.0, 4.0], [3.0, 2.0]], [0, 1, 0]))
    assert cm.values[0, 0] == 1.0
    assert cm.values[0, 1] == pytest.approx(-1.0, abs=1e-15)


def test_matches_direct_formula():
    X = np.random.default_rng(0).normal(size=(200, 8)) @ np.random.default_rng(1).normal(size=(8, 8))
    cm = pearson_correlation(make_ds(X, np.zeros(200, int)))
    cols = X.T.tolist()
    for i in range(8):
        for j in range(8):
            expect = 1.0 if i == j else pearson_pair(cols[i], cols[j])
            assert abs(cm.values[i, j] - expect) < 1e-10


def test_matrix_invariants():
    X = np.random.default_rng(2).normal(size=(50, 6))
    C = pearson_correlation(make_ds(X, np.zeros(50, int))).values
    assert np.array_equal(C, C.T)
    assert np.all(np.diag(C) == 1.0) and np.all(np.abs(C) <= 1.0)


def test_constant_column_convention():
    X = np.column_stack([np.arange(5.0), np.full(5, 0.1), np.arange(5.0) ** 2])
    cm = pearson_correlation(make_ds(X, np.zeros(5, int)))
    assert cm.constant_columns == {1}
    assert np.all(cm.values[1] == 0.0) and np.all(cm.values[:, 1] == 0.0)
    assert np.all(np.isfinite(cm.values))


def test_too_few_rows():
    with pytest.raises(DataError):
        pearson_correlation(make_ds([[1.0]], [0]))


def test_affine_invariance_and_row_permutation():
    g = np.random.default_rng(3)
    X = g.normal(size=(100, 3))
    base = pearson_correlation(make_ds(X, np.zeros(100, int))).values
    Y = X.copy()
    Y[:, 0] = 3.5 * Y[:, 0] + 7
    np.testing.assert_allclose(pearson_correlation(make_ds(Y, np.zeros(100, int))).values, base, atol=1e-10)
    Y[:, 0] = -2.0 * X[:, 0] + 1
    flipped = pearson_correlation(make_ds(Y, np.zeros(100, int))).values
    np.testing.assert_allclose(flipped[0, 1:], -base[0, 1:], atol=1e-10)
    perm = g.permutation(100)
    np.testing.assert_allclose(pearson_correlation(make_ds(X[perm], np.zeros(100, int))).values,
                               base, atol=1e-12, rtol=0)


def test_csv_grid_shape():
    text = pearson_correlation(make_ds(np.random.default_rng(0).normal(size=(10, 3)), [0] * 10)).to_csv()
    rows = [r.split(",") for r in text.strip().split("\n")]
    assert len(rows) == 4 and all(len(r) == 4 for r in rows)
    assert rows[0] == ["", "f0", "f1", "f2"]


def test_label_distribution():
    assert label_distribution(make_ds(np.zeros((0, 1)), np.zeros(0, int))) == (0, 0)
    assert label_distribution(synthesize(SyntheticConfig(n_samples=1000, fraud_rate=0.02))) == (980, 20)


def test_class_summary():
    ds = make_ds([[1.0], [2.0], [3.0], [4.0], [9.0]], [0, 0, 0, 0, 1])
    s = class_feature_summary(ds, [0])
    assert s[0]["f0"]["median"] == 2.5
    one = s[1]["f0"]
    assert one["mean"] == one["median"] == one["min"] == one["max"] == 9.0 and one["std"] == 0.0
    with pytest.raises(DataError):
        class_feature_summary(ds, [3])


def test_class_summary_matches_quantile_oracle():
    g = np.random.default_rng(4)
    X = g.normal(size=(301, 2))
    y = g.integers(0, 2, 301)
    s = class_feature_summary(make_ds(X, y), [0, 1])
    for label in (0, 1):
        col = X[y == label, 1]
        for key, p in (("q1", 0.25), ("median", 0.5), ("q3", 0.75)):
            assert abs(s[label]["f1"][key] - sorted_interp_quantile(col, p)) < 1e-12
