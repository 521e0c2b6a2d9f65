"""The network and the four baselines behind one fit/predict contract.

``fit_model(kind, train, hyperparams, seed)`` trains any of them;
``model_from_state`` rebuilds a fitted model from its serialised state.
"""

from ..errors import ConfigError
from .base import Classifier, sigmoid
from .knn import KNNClassifier, knn_predict_proba
from .linear import (LinearModel, LogisticConfig, SvmConfig, fit_linear_svm,
                     fit_logistic_regression)
from .mlp import (MLPClassifier, MlpParams, TrainConfig, bce_loss, init_params,
                  mlp_backward, mlp_forward, train_mlp)
from .tree import DecisionTree, TreeConfig, fit_decision_tree, gini

MODEL_KINDS = ("nn", "lr", "knn", "tree", "svm")

DEFAULT_HYPERPARAMS = {
    "nn": {"hidden": [32, 16], "learning_rate": 0.01, "epochs": 100, "batch_size": 32},
    "lr": {"learning_rate": 0.5, "epochs": 1000, "l2": 1e-4},
    "knn": {"k": 5},
    "tree": {"max_depth": 5, "min_samples_split": 2},
    "svm": {"lam": 1e-3, "iterations": 50_000},
}


def resolve_hyperparams(kind, overrides=None):
    if kind not in DEFAULT_HYPERPARAMS:
        raise ConfigError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    hp = dict(DEFAULT_HYPERPARAMS[kind])
    unknown = set(overrides or {}) - set(hp)
    if unknown:
        raise ConfigError(f"unknown hyperparameters for {kind}: {sorted(unknown)}")
    hp.update(overrides or {})
    return hp


def fit_model(kind, train, hyperparams=None, seed=0):
    hp = resolve_hyperparams(kind, hyperparams)
    if kind == "nn":
        cfg = TrainConfig(hp["learning_rate"], hp["epochs"], hp["batch_size"], seed)
        return MLPClassifier.fit(train, tuple(hp["hidden"]), cfg)
    if kind == "lr":
        return fit_logistic_regression(train, LogisticConfig(hp["learning_rate"], hp["epochs"], hp["l2"], seed))
    if kind == "svm":
        return fit_linear_svm(train, SvmConfig(hp["lam"], hp["iterations"], seed))
    if kind == "tree":
        return fit_decision_tree(train, TreeConfig(hp["max_depth"], hp["min_samples_split"], seed))
    return KNNClassifier.fit(train, hp["k"])


def model_from_state(kind, state):
    if kind == "nn":
        return MLPClassifier.from_state(state)
    if kind in ("lr", "svm"):
        return LinearModel.from_state(state, kind)
    if kind == "tree":
        return DecisionTree.from_state(state)
    if kind == "knn":
        return KNNClassifier.from_state(state)
    raise ConfigError(f"unknown model kind {kind!r}")


__all__ = [
    "Classifier", "DecisionTree", "KNNClassifier", "LinearModel", "LogisticConfig",
    "MLPClassifier", "MODEL_KINDS", "MlpParams", "SvmConfig", "TrainConfig", "TreeConfig",
    "bce_loss", "fit_decision_tree", "fit_linear_svm", "fit_logistic_regression", "fit_model",
    "gini", "init_params", "knn_predict_proba", "mlp_backward", "mlp_forward",
    "model_from_state", "resolve_hyperparams", "sigmoid", "train_mlp",
]
