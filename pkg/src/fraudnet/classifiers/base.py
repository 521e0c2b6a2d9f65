import numpy as np

from ..errors import DataError


def sigmoid(z):
    """Overflow-free logistic function; sigmoid(0) is exactly 0.5."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def as_matrix(X, n_features=None):
    X = np.asarray(getattr(X, "features", X), dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DataError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if n_features is not None and X.shape[1] != n_features:
        raise DataError(f"model expects {n_features} features, got {X.shape[1]}")
    return X


def require_both_classes(ds):
    n1 = int(ds.labels.sum())
    if ds.n_samples == 0 or n1 == 0 or n1 == ds.n_samples:
        raise DataError("training data must contain both classes")


class Classifier:
    """Shared contract: ``predict(X, t)[i] == 1`` iff ``predict_proba(X)[i] >= t``."""

    kind = None

    def predict_proba(self, X):
        raise NotImplementedError

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int64)

    def get_state(self):
        raise NotImplementedError

    @classmethod
    def from_state(cls, state):
        raise NotImplementedError
