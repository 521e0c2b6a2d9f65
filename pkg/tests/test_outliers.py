import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_ds
from oracles import sorted_interp_quantile
from fraudnet.errors import ConfigError, DataError
from fraudnet.outliers import iqr_filter, quantile, quartiles


def test_quartiles_hand_values():
    assert quartiles([1, 2, 3, 4]) == (1.75, 3.25)
    assert quartiles([4, 3, 2, 1]) == (1.75, 3.25)
    assert quartiles([5, 5, 5, 5, 5]) == (5.0, 5.0)
    assert quantile([7.0], 0.25) == 7.0


def test_quartiles_match_oracle():
    v = np.random.default_rng(0).normal(size=1001)
    q1, q3 = quartiles(v)
    assert abs(q1 - sorted_interp_quantile(v, 0.25)) < 1e-12
    assert abs(q3 - sorted_interp_quantile(v, 0.75)) < 1e-12


def test_quartiles_empty():
    with pytest.raises(DataError):
        quartiles([])


def _fixture():
    vals = list(range(1, 101)) + [1000]
    return make_ds(np.array(vals, float), [1] * 101)


def test_single_outlier_removed():
    ds = _fixture()
    out, rep = iqr_filter(ds, [0], 1.5, 1)
    assert rep.removed_row_indices == (100,)
    assert out.n_samples == 100 and out.features[:, 0].max() == 100.0
    f = rep.fences[0]
    assert f.q1 == sorted_interp_quantile(ds.features[:, 0], 0.25)
    assert f.iqr == f.q3 - f.q1
    assert f.upper_fence == f.q3 + 1.5 * f.iqr and 1000 > f.upper_fence


def test_huge_multiplier_is_noop():
    ds = _fixture()
    out, rep = iqr_filter(ds, [0], 1e9, 1)
    assert rep.removed_count == 0 and out.equals(ds)


def test_other_class_untouched():
    X = np.array([[1.0], [2.0], [3.0], [4.0], [500.0], [-900.0]])
    ds = make_ds(X, [1, 1, 1, 1, 1, 0])
    out, rep = iqr_filter(ds, [0], 1.5, 1)
    assert rep.removed_row_indices == (4,)
    assert -900.0 in out.features[:, 0]


def test_errors():
    ds = make_ds(np.arange(4.0), [0] * 4)
    with pytest.raises(DataError):
        iqr_filter(ds, [0], 1.5, 1)
    with pytest.raises(ConfigError):
        iqr_filter(ds, [0], 0.0, 0)


def test_report_serializes():
    _, rep = iqr_filter(_fixture(), [0], 1.5, 1)
    d = rep.to_dict()
    assert d["removed_count"] == 1 and d["features"][0]["feature"] == "f0"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(5, 80), st.integers(1, 3))
def test_containment_monotonicity_and_scope(seed, n, d):
    g = np.random.default_rng(seed)
    X = g.standard_t(2, size=(n, d))
    y = g.integers(0, 2, n)
    y[:2] = 1
    ds = make_ds(X, y)
    feats = list(range(d))
    prev = None
    for m in (0.5, 1.0, 1.5, 3.0, 10.0):
        out, rep = iqr_filter(ds, feats, m, 1)
        scope = out.features[out.labels == 1]
        for j, f in enumerate(rep.fences):
            assert np.all(scope[:, j] >= f.lower_fence) and np.all(scope[:, j] <= f.upper_fence)
        assert np.array_equal(out.features[out.labels == 0], ds.features[ds.labels == 0])
        if prev is not None:
            assert rep.removed_count <= prev
        prev = rep.removed_count
