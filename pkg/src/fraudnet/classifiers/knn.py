import numpy as np

from ..data import Dataset
from ..errors import ConfigError
from ..resampling import smallest_k, squared_distances
from .base import Classifier, as_matrix


def knn_predict_proba(train, X, k=5):
    """Fraction of positives among the k nearest training rows of each query.

    Neighbours follow the (distance, index) rule of
    :func:`fraudnet.resampling.nearest_neighbors`; a query equal to a
    training row counts that row.
    """
    k = int(k)
    if k < 1 or k > train.n_samples:
        raise ConfigError(f"k={k} must lie in [1, {train.n_samples}]")
    X = as_matrix(X, train.n_features)
    P = train.features
    labels = train.labels
    out = np.empty(X.shape[0])
    for q in range(X.shape[0]):
        nn = smallest_k(squared_distances(P, X[q]), k)
        out[q] = labels[nn].sum() / k
    return out


class KNNClassifier(Classifier):
    kind = "knn"

    def __init__(self, train, k=5):
        if int(k) < 1 or int(k) > train.n_samples:
            raise ConfigError(f"k={k} must lie in [1, {train.n_samples}]")
        self.train = train
        self.k = int(k)

    @classmethod
    def fit(cls, train, k=5):
        return cls(train, k)

    def predict_proba(self, X):
        return knn_predict_proba(self.train, X, self.k)

    def get_state(self):
        return {
            "k": self.k,
            "feature_names": list(self.train.feature_names),
            "features": self.train.features.tolist(),
            "labels": self.train.labels.tolist(),
        }

    @classmethod
    def from_state(cls, state):
        names = state["feature_names"]
        X = np.asarray(state["features"], dtype=np.float64).reshape(-1, len(names))
        return cls(Dataset(X, state["labels"], names), state["k"])
