"""CART classification tree with Gini impurity and exhaustive split search."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError
from .base import Classifier, as_matrix

LEAF = -1


def gini(labels):
    labels = np.asarray(labels)
    if labels.size == 0:
        return 0.0
    p = labels.mean()
    return float(1.0 - p * p - (1.0 - p) * (1.0 - p))


@dataclass(frozen=True)
class TreeConfig:
    max_depth: object = 5  # None for unlimited
    min_samples_split: int = 2
    seed: int = 0


def _best_split(X, y):
    """Return (gain, feature, threshold) of the best split, or None.

    Thresholds are midpoints between consecutive distinct sorted values; rows
    with ``x <= threshold`` go left. Ties go to the lower feature index and
    then the lower threshold.
    """
    n = y.shape[0]
    total_pos = y.sum()
    p = total_pos / n
    parent = 1.0 - p * p - (1.0 - p) ** 2
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        valid = np.flatnonzero(xs[1:] != xs[:-1])
        if valid.size == 0:
            continue
        pos_left = np.cumsum(y[order])[valid]
        n_left = (valid + 1).astype(np.float64)
        n_right = n - n_left
        pl = pos_left / n_left
        pr = (total_pos - pos_left) / n_right
        g_left = 1.0 - pl * pl - (1.0 - pl) ** 2
        g_right = 1.0 - pr * pr - (1.0 - pr) ** 2
        gain = parent - (n_left * g_left + n_right * g_right) / n
        j = int(np.argmax(gain))
        if best is None or gain[j] > best[0]:
            a, b = xs[valid[j]], xs[valid[j] + 1]
            thr = (a + b) / 2.0
            if not a <= thr < b:
                thr = a
            best = (float(gain[j]), f, float(thr))
    return best


def fit_decision_tree(train, config=TreeConfig()):
    if train.n_samples == 0:
        raise DataError("cannot fit a tree on an empty dataset")
    max_depth = config.max_depth
    if max_depth is not None and (int(max_depth) != max_depth or max_depth < 0):
        raise ConfigError(f"max_depth must be a non-negative integer or None, got {max_depth}")
    if config.min_samples_split < 2:
        raise ConfigError("min_samples_split must be >= 2")
    X = train.features
    y = train.labels.astype(np.float64)

    feature, threshold, left, right, prob = [], [], [], [], []

    def new_node(rows):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        prob.append(float(y[rows].mean()))
        return len(feature) - 1

    root = new_node(np.arange(train.n_samples))
    stack = [(root, np.arange(train.n_samples), 0)]
    while stack:
        node, rows, depth = stack.pop()
        ys = y[rows]
        pure = ys.min() == ys.max()
        if pure or (max_depth is not None and depth >= max_depth) or rows.size < config.min_samples_split:
            continue
        split = _best_split(X[rows], ys)
        if split is None:
            continue
        _, f, thr = split
        go_left = X[rows, f] <= thr
        lrows, rrows = rows[go_left], rows[~go_left]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        # right pushed first so the left subtree is numbered first
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))
    return DecisionTree(feature, threshold, left, right, prob, train.n_features)


class DecisionTree(Classifier):
    kind = "tree"

    def __init__(self, feature, threshold, left, right, prob, n_features):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.prob = np.asarray(prob, dtype=np.float64)
        self.n_features = int(n_features)
        m = self.feature.shape[0]
        if m == 0 or not all(a.shape == (m,) for a in (self.threshold, self.left, self.right, self.prob)):
            raise DataError("inconsistent tree node arrays")
        internal = self.feature != LEAF
        for arr in (self.left[internal], self.right[internal]):
            if np.any((arr <= 0) | (arr >= m)):
                raise DataError("tree child index out of range")
        if np.any(self.feature[internal] >= self.n_features):
            raise DataError("tree split feature out of range")

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    def depth(self):
        def walk(i):
            if self.feature[i] == LEAF:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))
        return walk(0)

    def predict_proba(self, X):
        X = as_matrix(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while np.any(active):
            idx = np.flatnonzero(active)
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] != LEAF
        return self.prob[node].copy()

    def get_state(self):
        return {
            "n_features": self.n_features,
            "nodes": [
                {"feature": int(f), "threshold": float(t), "left": int(l), "right": int(r), "prob": float(p)}
                for f, t, l, r, p in zip(self.feature, self.threshold, self.left, self.right, self.prob)
            ],
        }

    @classmethod
    def from_state(cls, state):
        nodes = state["nodes"]
        cols = {k: [nd[k] for nd in nodes] for k in ("feature", "threshold", "left", "right", "prob")}
        return cls(cols["feature"], cols["threshold"], cols["left"], cols["right"], cols["prob"],
                   state["n_features"])
