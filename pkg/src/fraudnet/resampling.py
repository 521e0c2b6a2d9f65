"""Class rebalancing: random undersampling to 50/50 and SMOTE oversampling.

Also home of the exact nearest-neighbour rule shared with the k-NN
classifier: squared Euclidean distance, ties broken by lower row index.
"""

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import ConfigError, DataError
from .seeding import check_seed, rng, round_half_up

ORIGINAL = 0
SYNTHETIC = 1


def squared_distances(points, query):
    diff = points - query
    return np.einsum("ij,ij->i", diff, diff)


def smallest_k(dist, k, exclude=None):
    """Indices of the k smallest entries of ``dist``, sorted by (value, index)."""
    dist = np.asarray(dist, dtype=np.float64)
    if exclude is not None:
        dist = dist.copy()
        dist[exclude] = np.inf
    n = dist.shape[0]
    if k >= n:
        cand = np.arange(n)
    else:
        kth = np.partition(dist, k - 1)[k - 1]
        cand = np.flatnonzero(dist <= kth)
    order = np.lexsort((cand, dist[cand]))
    return cand[order[:k]]


def nearest_neighbors(points, query_index, k):
    """The k rows closest to ``points[query_index]``, the query itself excluded."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if not 0 <= query_index < n:
        raise DataError(f"query_index {query_index} out of range for {n} points")
    if k < 1 or k > n - 1:
        raise ConfigError(f"k={k} must lie in [1, n-1={n - 1}]")
    dist = squared_distances(points, points[query_index])
    return smallest_k(dist, k, exclude=query_index)


@dataclass(frozen=True, eq=False)
class ResampleOutput:
    """Resampled data plus per-row provenance.

    ``kind[r]`` is ORIGINAL or SYNTHETIC. For original rows ``base[r]`` is the
    input row index; for synthetic rows ``base``/``neighbor`` are the input
    indices of the two parents and ``lam`` the interpolation factor.
    """

    dataset: Dataset
    kind: np.ndarray
    base: np.ndarray
    neighbor: np.ndarray
    lam: np.ndarray

    @property
    def synthetic_mask(self):
        return self.kind == SYNTHETIC

    def provenance_records(self):
        out = []
        for kd, b, nb, lam in zip(self.kind.tolist(), self.base.tolist(),
                                  self.neighbor.tolist(), self.lam.tolist()):
            if kd == ORIGINAL:
                out.append({"kind": "original", "base": b, "neighbor": None, "lambda": None})
            else:
                out.append({"kind": "synthetic", "base": b, "neighbor": nb, "lambda": lam})
        return out

    @classmethod
    def identity(cls, ds, order=None):
        idx = np.arange(ds.n_samples) if order is None else np.asarray(order, dtype=np.int64)
        return cls(
            ds if order is None else ds.subset(idx),
            np.full(idx.shape[0], ORIGINAL, dtype=np.int8),
            idx.astype(np.int64),
            np.full(idx.shape[0], -1, dtype=np.int64),
            np.full(idx.shape[0], np.nan),
        )


def _class_counts(ds):
    n1 = int(ds.labels.sum())
    return ds.n_samples - n1, n1


def random_undersample(ds, seed):
    """Keep the minority class whole, draw an equal-size majority subset
    without replacement, shuffle the result."""
    n0, n1 = _class_counts(ds)
    if n0 == 0 or n1 == 0:
        raise DataError("random undersampling needs both classes present")
    g = rng(seed)
    minority = 1 if n1 <= n0 else 0
    keep_min = ds.class_indices(minority)
    pool = ds.class_indices(1 - minority)
    keep_maj = np.sort(g.choice(pool, size=keep_min.size, replace=False))
    rows = g.permutation(np.concatenate([keep_min, keep_maj]))
    return ResampleOutput.identity(ds, rows)


@dataclass(frozen=True)
class SmoteConfig:
    """``target`` is ``"equalize"`` or a float minority/majority ratio;
    ``n_synthetic`` (if set) overrides it with an explicit row count."""

    k: int = 5
    target: object = "equalize"
    seed: int = 0
    n_synthetic: object = None

    def validate(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError(f"SMOTE k must be a positive integer, got {self.k}")
        if self.n_synthetic is not None and (int(self.n_synthetic) != self.n_synthetic
                                             or self.n_synthetic < 0):
            raise ConfigError(f"n_synthetic must be a non-negative integer, got {self.n_synthetic}")
        if self.target != "equalize":
            if isinstance(self.target, str) or not 0.0 < float(self.target) <= 1.0:
                raise ConfigError(f"SMOTE target must be 'equalize' or a ratio in (0, 1], got {self.target!r}")
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def _n_to_generate(config, n_min, n_maj):
    if config.n_synthetic is not None:
        return int(config.n_synthetic)
    if config.target == "equalize":
        return max(n_maj - n_min, 0)
    return max(round_half_up(float(config.target) * n_maj) - n_min, 0)


def smote(ds, config=SmoteConfig()):
    """Append synthetic minority rows ``x_i + lam * (x_nn - x_i)``.

    Base points cycle round-robin over the minority rows; the remainder
    after the last full cycle is a seeded draw without replacement. The
    neighbour is uniform among the base's k nearest minority rows and
    ``lam ~ U[0, 1)``.
    """
    config.validate()
    n0, n1 = _class_counts(ds)
    minority = 1 if n1 <= n0 else 0
    n_min, n_maj = (n1, n0) if minority == 1 else (n0, n1)
    n_new = _n_to_generate(config, n_min, n_maj)
    if n_new == 0:
        return ResampleOutput.identity(ds)
    if n_min < 2:
        raise ConfigError(f"SMOTE needs at least 2 minority rows, got {n_min}")
    k = int(config.k)
    if k > n_min - 1:
        raise ConfigError(f"SMOTE k={k} exceeds minority_count - 1 = {n_min - 1}")

    min_idx = ds.class_indices(minority)
    M = ds.features[min_idx]
    neigh = np.stack([nearest_neighbors(M, i, k) for i in range(n_min)])

    g = rng(config.seed)
    full, rem = divmod(n_new, n_min)
    bases = np.concatenate([np.tile(np.arange(n_min), full),
                            g.choice(n_min, size=rem, replace=False)]).astype(np.int64)
    picks = g.integers(0, k, size=n_new)
    lam = g.random(n_new)
    nbrs = neigh[bases, picks]
    lo, hi = np.minimum(M[bases], M[nbrs]), np.maximum(M[bases], M[nbrs])
    # clip guards the parent bounding box against 1-ulp rounding overshoot
    synth = np.clip(M[bases] + lam[:, None] * (M[nbrs] - M[bases]), lo, hi)

    X = np.vstack([ds.features, synth])
    y = np.concatenate([ds.labels, np.full(n_new, minority, dtype=np.int64)])
    n = ds.n_samples
    return ResampleOutput(
        Dataset(X, y, ds.feature_names),
        np.concatenate([np.full(n, ORIGINAL, dtype=np.int8), np.full(n_new, SYNTHETIC, dtype=np.int8)]),
        np.concatenate([np.arange(n, dtype=np.int64), min_idx[bases]]),
        np.concatenate([np.full(n, -1, dtype=np.int64), min_idx[nbrs]]),
        np.concatenate([np.full(n, np.nan), lam]),
    )
