"""Pearson correlation matrices, label counts and per-class feature summaries."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .outliers import quantile


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    values: np.ndarray
    feature_names: tuple
    constant_columns: frozenset

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + list(self.feature_names))
        for name, row in zip(self.feature_names, self.values.tolist()):
            w.writerow([name] + [repr(v) for v in row])
        return buf.getvalue()

    def to_dict(self):
        return {
            "feature_names": list(self.feature_names),
            "values": self.values.tolist(),
            "constant_columns": sorted(self.constant_columns),
        }


def pearson_correlation(ds):
    """Pearson coefficients for every column pair.

    Zero-variance columns correlate 0 with everything (themselves included)
    and are listed in ``constant_columns``.
    """
    X = ds.features
    n, d = X.shape
    if n < 2:
        raise DataError(f"correlation needs at least 2 rows, got {n}")
    constant = np.all(X == X[0], axis=0)
    Xc = X - X.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    safe = np.where(constant, 1.0, norms)
    Z = Xc / safe
    C = Z.T @ Z
    C = (C + C.T) / 2.0
    C = np.clip(C, -1.0, 1.0)
    C[constant, :] = 0.0
    C[:, constant] = 0.0
    diag = np.flatnonzero(~constant)
    C[diag, diag] = 1.0
    return CorrelationMatrix(C, ds.feature_names, frozenset(int(i) for i in np.flatnonzero(constant)))


def label_distribution(ds):
    n1 = int(ds.labels.sum())
    return ds.n_samples - n1, n1


def class_feature_summary(ds, features):
    """Per (class, feature) mean, population std, quartiles, median, min, max.

    Returns ``{label: {feature_name: {...}}}``.
    """
    features = [int(f) for f in features]
    for f in features:
        if not 0 <= f < ds.n_features:
            raise DataError(f"feature index {f} out of range for {ds.n_features} features")
    out = {}
    for label in (0, 1):
        rows = ds.class_indices(label)
        if rows.size == 0:
            raise DataError(f"class {label} is empty")
        per = {}
        for f in features:
            col = ds.features[rows, f]
            mean = float(col.mean())
            per[ds.feature_names[f]] = {
                "mean": mean,
                "std": float(np.sqrt(np.mean((col - mean) ** 2))),
                "q1": quantile(col, 0.25),
                "median": quantile(col, 0.5),
                "q3": quantile(col, 0.75),
                "min": float(col.min()),
                "max": float(col.max()),
            }
        out[label] = per
    return out
