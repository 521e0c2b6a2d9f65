"""Linear baselines: L2-regularised logistic regression and a Pegasos linear SVM."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError, TrainingDivergenceError
from ..seeding import check_seed, rng
from .base import Classifier, as_matrix, require_both_classes, sigmoid


class LinearModel(Classifier):
    """``predict_proba = sigmoid(X @ w + b)``.

    For the SVM the sigmoid of the margin is only a convention that keeps
    the shared threshold contract: at t = 0.5 it reproduces ``sign(margin)``.
    """

    def __init__(self, w, b, kind="lr"):
        self.w = np.asarray(w, dtype=np.float64)
        self.b = float(b)
        self.kind = kind

    def decision_function(self, X):
        return as_matrix(X, self.w.shape[0]) @ self.w + self.b

    def predict_proba(self, X):
        return sigmoid(self.decision_function(X))

    def get_state(self):
        return {"w": self.w.tolist(), "b": self.b}

    @classmethod
    def from_state(cls, state, kind="lr"):
        w = np.asarray(state["w"], dtype=np.float64)
        if w.ndim != 1:
            raise DataError("linear model weights must be a vector")
        return cls(w, float(state["b"]), kind)


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.5
    epochs: int = 1000
    l2: float = 1e-4
    seed: int = 0


def fit_logistic_regression(train, config=LogisticConfig()):
    """Full-batch gradient descent on mean BCE + (l2/2)||w||^2 from w = 0, b = 0.

    The penalty is applied as a proximal (implicit) step,
    ``w <- (w - lr * grad) / (1 + lr * l2)``, so arbitrarily large ``l2``
    shrinks the weights instead of blowing the iteration up. The bias is
    not penalised.
    """
    if not config.learning_rate > 0 or config.l2 < 0 or config.epochs < 0:
        raise ConfigError(f"invalid logistic-regression config {config}")
    check_seed(config.seed)
    require_both_classes(train)
    X, y = train.features, train.labels.astype(np.float64)
    n, d = X.shape
    w, b = np.zeros(d), 0.0
    lr = config.learning_rate
    for epoch in range(1, int(config.epochs) + 1):
        r = (sigmoid(X @ w + b) - y) / n
        w = (w - lr * (X.T @ r)) / (1.0 + lr * config.l2)
        b -= lr * float(r.sum())
        if not (np.all(np.isfinite(w)) and math.isfinite(b)):
            raise TrainingDivergenceError(epoch)
    return LinearModel(w, b, "lr")


@dataclass(frozen=True)
class SvmConfig:
    lam: float = 1e-3
    iterations: int = 50_000
    seed: int = 0


def fit_linear_svm(train, config=SvmConfig()):
    """Pegasos: stochastic subgradient descent on hinge loss + (lam/2)||w||^2.

    Step size 1/(lam * t); after every step w is projected onto the ball of
    radius 1/sqrt(lam). The bias is learned as the weight of an appended
    constant feature and is therefore regularised too. Labels map to +/-1.
    """
    if not config.lam > 0 or config.iterations < 1:
        raise ConfigError(f"invalid SVM config {config}")
    require_both_classes(train)
    X = np.hstack([train.features, np.ones((train.n_samples, 1))])
    y = np.where(train.labels == 1, 1.0, -1.0)
    g = rng(config.seed)
    picks = g.integers(0, X.shape[0], size=int(config.iterations))
    lam = float(config.lam)
    radius = 1.0 / math.sqrt(lam)
    w = np.zeros(X.shape[1])
    for t, i in enumerate(picks.tolist(), start=1):
        eta = 1.0 / (lam * t)
        margin = y[i] * float(X[i] @ w)
        w *= 1.0 - eta * lam
        if margin < 1.0:
            w += (eta * y[i]) * X[i]
        norm = float(np.sqrt(w @ w))
        if norm > radius:
            w *= radius / norm
    if not np.all(np.isfinite(w)):
        raise TrainingDivergenceError(int(config.iterations), "SVM weights became non-finite")
    return LinearModel(w[:-1], w[-1], "svm")
