"""Dataset container, CSV ingestion of the card-transaction schema, a
synthetic two-blob generator, z-score scaling and stratified splitting."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, LabelDomainError, ParseError, SchemaError
from .seeding import check_seed, rng, round_half_up

LABEL_COLUMN = "Class"
CREDITCARD_FEATURES = ("Time",) + tuple(f"V{i}" for i in range(1, 29)) + ("Amount",)
CREDITCARD_SCHEMA = CREDITCARD_FEATURES + (LABEL_COLUMN,)


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix (n x d, float64), binary labels and column names.

    Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        names = tuple(str(s) for s in self.feature_names)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, len(names))
        if X.ndim != 2:
            raise DataError(f"features must be a 2-D matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or infinite values")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DataError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
        if y.size and not np.all((y == 0) | (y == 1)):
            bad = y[(y != 0) & (y != 1)][0]
            raise LabelDomainError(f"label {bad!r} outside {{0, 1}}")
        if len(names) != X.shape[1]:
            raise DataError(f"{len(names)} feature names for {X.shape[1]} columns")
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y.astype(np.int64)))
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def __len__(self):
        return self.n_samples

    def column_index(self, name):
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise SchemaError(name, f"no feature named {name!r}") from None

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names)

    def with_features(self, features):
        return Dataset(features, self.labels, self.feature_names)

    def class_indices(self, label):
        return np.flatnonzero(self.labels == label)

    def equals(self, other):
        return (
            self.feature_names == other.feature_names
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )


# --------------------------------------------------------------------------- CSV


def _parse_float(text, row, column):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(row, column, text) from None
    if not math.isfinite(v):
        raise ParseError(row, column, text)
    return v


def load_csv(path, schema=CREDITCARD_SCHEMA):
    """Read a CSV whose header contains every name in ``schema``.

    The last schema entry is the label column. Columns are returned in
    schema order; row order is preserved. Quoted cells (including a quoted
    ``"0"``/``"1"`` class) are accepted.
    """
    schema = tuple(schema)
    if len(schema) < 2:
        raise ConfigError("schema needs at least one feature and a label column")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(schema[0], "file is empty (no header row)") from None
        for name in schema:
            if name not in header:
                raise SchemaError(name)
        extra = [h for h in header if h not in schema]
        if extra:
            raise SchemaError(extra[0], f"unexpected column {extra[0]!r}")
        if len(set(header)) != len(header):
            raise SchemaError(header[0], "duplicate column names in header")
        positions = [header.index(name) for name in schema]
        feats, labels = [], []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise DataError(f"row {lineno} has {len(cells)} cells, expected {len(header)}")
            values = [
                _parse_float(cells[p].strip(), lineno, name)
                for p, name in zip(positions[:-1], schema[:-1])
            ]
            raw = cells[positions[-1]].strip()
            lab = _parse_float(raw, lineno, schema[-1])
            if lab not in (0.0, 1.0):
                raise LabelDomainError(f"label {raw!r} at row {lineno} outside {{0, 1}}")
            feats.append(values)
            labels.append(int(lab))
    X = np.array(feats, dtype=np.float64).reshape(len(feats), len(schema) - 1)
    return Dataset(X, np.array(labels, dtype=np.int64), schema[:-1])


def write_csv(ds, path, label_column=LABEL_COLUMN):
    """Write ``ds`` with floats as shortest round-trip decimals."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(ds.feature_names) + [label_column])
        for row, lab in zip(ds.features.tolist(), ds.labels.tolist()):
            w.writerow([repr(v) for v in row] + [str(lab)])


# --------------------------------------------------------------------- synthesis


@dataclass(frozen=True)
class SyntheticConfig:
    n_samples: int = 20_000
    fraud_rate: float = 0.01
    n_features: int = 30
    class_separation: float = 2.0
    seed: int = 42

    @property
    def n_positive(self):
        return round_half_up(self.n_samples * self.fraud_rate)

    def validate(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ConfigError(f"n_samples must be a positive integer, got {self.n_samples}")
        if int(self.n_features) != self.n_features or self.n_features < 1:
            raise ConfigError(f"n_features must be a positive integer, got {self.n_features}")
        if not 0.0 < self.fraud_rate < 1.0:
            raise ConfigError(f"fraud_rate must lie in (0, 1), got {self.fraud_rate}")
        if not (self.class_separation >= 0 and math.isfinite(self.class_separation)):
            raise ConfigError(f"class_separation must be >= 0, got {self.class_separation}")
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if self.n_positive < 2:
            raise ConfigError(
                f"round(n_samples * fraud_rate) = {self.n_positive}; at least 2 positives required"
            )
        if self.n_positive >= self.n_samples:
            raise ConfigError("fraud_rate leaves no negative samples")


def default_feature_names(d):
    if d == len(CREDITCARD_FEATURES):
        return CREDITCARD_FEATURES
    return tuple(f"x{i}" for i in range(d))


def synthesize(config):
    """Two isotropic unit-variance Gaussian blobs.

    The negative centroid sits at the origin, the positive one at distance
    ``class_separation`` along the all-ones diagonal. Exactly
    ``round(n_samples * fraud_rate)`` rows are positive, at random positions.
    A 30-feature dataset gets the card-transaction column names.
    """
    config.validate()
    n, d = int(config.n_samples), int(config.n_features)
    g = rng(config.seed)
    labels = np.zeros(n, dtype=np.int64)
    labels[g.permutation(n)[: config.n_positive]] = 1
    X = g.standard_normal((n, d))
    direction = np.full(d, 1.0 / math.sqrt(d))
    X[labels == 1] += config.class_separation * direction
    return Dataset(X, labels, default_feature_names(d))


# ----------------------------------------------------------------- standardizing


@dataclass(frozen=True, eq=False)
class ScalerParams:
    columns: tuple
    mean: np.ndarray
    std: np.ndarray
    constant: tuple
    n_features: int

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(int(c) for c in self.columns))
        object.__setattr__(self, "mean", _frozen(np.asarray(self.mean, dtype=np.float64)))
        object.__setattr__(self, "std", _frozen(np.asarray(self.std, dtype=np.float64)))
        object.__setattr__(self, "constant", tuple(bool(c) for c in self.constant))
        k = len(self.columns)
        if self.mean.shape != (k,) or self.std.shape != (k,) or len(self.constant) != k:
            raise DataError("scaler arrays must have one entry per column")
        for s, const in zip(self.std, self.constant):
            if not const and not s > 0:
                raise DataError("non-constant scaled column with non-positive spread")

    def to_dict(self):
        return {
            "columns": list(self.columns),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "constant": list(self.constant),
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["columns"], d["mean"], d["std"], d["constant"], int(d["n_features"]))


def fit_standardizer(ds, columns):
    """Per-column mean and population standard deviation (divisor n)."""
    if ds.n_samples == 0:
        raise DataError("cannot fit a standardizer on an empty dataset")
    columns = [int(c) for c in columns]
    for c in columns:
        if not 0 <= c < ds.n_features:
            raise DataError(f"column index {c} out of range for {ds.n_features} features")
    cols = ds.features[:, columns]
    mean = cols.mean(axis=0)
    std = np.sqrt(((cols - mean) ** 2).mean(axis=0))
    constant = [bool(np.all(cols[:, i] == cols[0, i])) for i in range(len(columns))]
    std = np.where(constant, 0.0, std)
    return ScalerParams(columns, mean, std, constant, ds.n_features)


def apply_standardizer(ds, params):
    if ds.n_features != params.n_features:
        raise DataError(
            f"scaler fitted on {params.n_features} columns, dataset has {ds.n_features}"
        )
    X = np.array(ds.features)
    for c, mu, sd, const in zip(params.columns, params.mean, params.std, params.constant):
        if not const:
            X[:, c] = (X[:, c] - mu) / sd
    return ds.with_features(X)


# ---------------------------------------------------------------------- splitting


def stratified_split_indices(labels, test_fraction, seed):
    """Per class, ``round(count * test_fraction)`` seeded picks go to test.

    Returns sorted (train_idx, test_idx).
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    labels = np.asarray(labels)
    g = rng(seed)
    test = []
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if members.size < 2:
            raise DataError(f"class {cls} has {members.size} members; stratified split needs >= 2")
        k = round_half_up(members.size * test_fraction)
        test.append(g.permutation(members)[:k])
    test_idx = np.sort(np.concatenate(test))
    mask = np.ones(labels.shape[0], dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx


def stratified_split(ds, test_fraction, seed):
    train_idx, test_idx = stratified_split_indices(ds.labels, test_fraction, seed)
    return ds.subset(train_idx), ds.subset(test_idx)
