"""Feed-forward network with ReLU hidden layers and a sigmoid output unit,
trained by mini-batch gradient descent on binary cross-entropy."""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError, DataError, TrainingDivergenceError
from ..seeding import check_seed, rng
from .base import Classifier, as_matrix, require_both_classes, sigmoid

log = logging.getLogger(__name__)

BCE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class MlpParams:
    """Layer l maps ``h_{l-1}`` inputs to ``h_l`` outputs with ``weights[l]`` of
    shape (h_l, h_{l-1}) and ``biases[l]`` of length h_l. Hidden layers use
    ReLU, the final single unit a sigmoid."""

    layer_sizes: tuple
    weights: tuple
    biases: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "weights", tuple(np.asarray(w, dtype=np.float64) for w in self.weights))
        object.__setattr__(self, "biases", tuple(np.asarray(b, dtype=np.float64) for b in self.biases))
        if len(sizes) < 2 or sizes[-1] != 1:
            raise DataError(f"layer_sizes must be (d, ..., 1), got {sizes}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise DataError("need one weight matrix and one bias vector per layer")
        for l, (W, b) in enumerate(zip(self.weights, self.biases), start=1):
            if W.shape != (sizes[l], sizes[l - 1]):
                raise DataError(f"layer {l}: weight shape {W.shape}, expected {(sizes[l], sizes[l - 1])}")
            if b.shape != (sizes[l],):
                raise DataError(f"layer {l}: bias shape {b.shape}, expected {(sizes[l],)}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise DataError(f"layer {l}: non-finite parameters")

    @property
    def n_layers(self):
        return len(self.weights)

    def activations(self):
        return ("relu",) * (self.n_layers - 1) + ("sigmoid",)


def init_params(layer_sizes, seed):
    """He-uniform weights for ReLU layers, Xavier-uniform for the output layer,
    zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    g = rng(seed)
    weights, biases = [], []
    for l in range(1, len(sizes)):
        fan_in, fan_out = sizes[l - 1], sizes[l]
        if l < len(sizes) - 1:
            limit = math.sqrt(6.0 / fan_in)
        else:
            limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(g.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(sizes, tuple(weights), tuple(biases))


def mlp_forward(params, X):
    """Return ``(activations, probabilities)``.

    ``activations[0]`` is the input and ``activations[l]`` the output of
    layer l (samples in rows), so ``Z = A_prev @ W.T + b``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.layer_sizes[0]:
        raise DataError(f"layer 1: input has shape {X.shape}, expected (n, {params.layer_sizes[0]})")
    acts = [X]
    A = X
    last = params.n_layers - 1
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        Z = A @ W.T + b
        A = sigmoid(Z) if l == last else np.maximum(Z, 0.0)
        acts.append(A)
    return acts, A[:, 0]


def bce_loss(y_hat, y):
    y_hat = np.asarray(y_hat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y_hat.shape != y.shape:
        raise DataError(f"length mismatch: {y_hat.shape} predictions vs {y.shape} labels")
    p = np.clip(y_hat, BCE_EPS, 1.0 - BCE_EPS)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def mlp_backward(params, X, y):
    """Gradients of the mean BCE loss with respect to every weight and bias.

    Uses the sigmoid/cross-entropy shortcut ``delta_out = (y_hat - y) / N``;
    the ReLU derivative at exactly 0 is taken as 0.
    """
    y = np.asarray(y, dtype=np.float64)
    acts, y_hat = mlp_forward(params, X)
    if y.shape != (X.shape[0],):
        raise DataError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
    n = X.shape[0]
    delta = ((y_hat - y) / n)[:, None]
    gW = [None] * params.n_layers
    gb = [None] * params.n_layers
    for l in range(params.n_layers - 1, -1, -1):
        gW[l] = delta.T @ acts[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ params.weights[l]) * (acts[l] > 0.0)
    return tuple(gW), tuple(gb)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0

    def validated(self, n):
        if not self.learning_rate >= 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if int(self.epochs) != self.epochs or self.epochs < 0:
            raise ConfigError(f"epochs must be a non-negative integer, got {self.epochs}")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise ConfigError(f"batch_size must be a positive integer, got {self.batch_size}")
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if self.batch_size > n:
            log.info("batch_size %d clamped to training size %d", self.batch_size, n)
            return replace(self, batch_size=n)
        return self


def full_layer_sizes(n_inputs, hidden):
    return (int(n_inputs),) + tuple(int(h) for h in hidden) + (1,)


def train_mlp(train, hidden=(32, 16), config=TrainConfig()):
    """Mini-batch gradient descent with a seeded reshuffle every epoch.

    ``loss_history[0]`` is the full-data loss at initialisation and
    ``loss_history[e]`` the loss after epoch e.
    """
    require_both_classes(train)
    X, y = train.features, train.labels.astype(np.float64)
    n = X.shape[0]
    cfg = config.validated(n)
    g = rng(cfg.seed)
    params = init_params(full_layer_sizes(X.shape[1], hidden), int(g.integers(0, 2**63)))
    Ws = [w.copy() for w in params.weights]
    bs = [b.copy() for b in params.biases]

    def snapshot():
        return MlpParams(params.layer_sizes, tuple(Ws), tuple(bs))

    history = [bce_loss(mlp_forward(params, X)[1], y)]
    lr = cfg.learning_rate
    for epoch in range(1, cfg.epochs + 1):
        order = g.permutation(n)
        if lr > 0:
            # overflow is caught by the finiteness check below
            with np.errstate(over="ignore", invalid="ignore"):
                for start in range(0, n, cfg.batch_size):
                    idx = order[start:start + cfg.batch_size]
                    gW, gb = _grads(Ws, bs, X[idx], y[idx])
                    for l in range(len(Ws)):
                        Ws[l] -= lr * gW[l]
                        bs[l] -= lr * gb[l]
        if not all(np.all(np.isfinite(w)) for w in Ws):
            raise TrainingDivergenceError(epoch)
        loss = bce_loss(_forward_raw(Ws, bs, X), y)
        if not math.isfinite(loss):
            raise TrainingDivergenceError(epoch)
        history.append(loss)
    return snapshot(), history


def _forward_raw(Ws, bs, X):
    A = X
    for l, (W, b) in enumerate(zip(Ws, bs)):
        Z = A @ W.T + b
        A = sigmoid(Z) if l == len(Ws) - 1 else np.maximum(Z, 0.0)
    return A[:, 0]


def _grads(Ws, bs, X, y):
    # same algebra as mlp_backward without re-validating shapes every batch
    acts = [X]
    A = X
    for l, (W, b) in enumerate(zip(Ws, bs)):
        Z = A @ W.T + b
        A = sigmoid(Z) if l == len(Ws) - 1 else np.maximum(Z, 0.0)
        acts.append(A)
    delta = ((A[:, 0] - y) / X.shape[0])[:, None]
    gW = [None] * len(Ws)
    gb = [None] * len(Ws)
    for l in range(len(Ws) - 1, -1, -1):
        gW[l] = delta.T @ acts[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ Ws[l]) * (acts[l] > 0.0)
    return gW, gb


class MLPClassifier(Classifier):
    kind = "nn"

    def __init__(self, params, loss_history=()):
        self.params = params
        self.loss_history = tuple(loss_history)

    @classmethod
    def fit(cls, train, hidden=(32, 16), config=TrainConfig()):
        params, history = train_mlp(train, hidden, config)
        return cls(params, history)

    def predict_proba(self, X):
        return mlp_forward(self.params, as_matrix(X, self.params.layer_sizes[0]))[1]

    def get_state(self):
        return {
            "layer_sizes": list(self.params.layer_sizes),
            "weights": [w.ravel().tolist() for w in self.params.weights],
            "biases": [b.tolist() for b in self.params.biases],
        }

    @classmethod
    def from_state(cls, state):
        sizes = [int(s) for s in state["layer_sizes"]]
        weights = []
        for l, flat in enumerate(state["weights"], start=1):
            flat = np.asarray(flat, dtype=np.float64)
            if l >= len(sizes) or flat.size != sizes[l] * sizes[l - 1]:
                raise DataError(f"layer {l}: weight array does not match layer sizes {sizes}")
            weights.append(flat.reshape(sizes[l], sizes[l - 1]))
        return cls(MlpParams(sizes, tuple(weights), tuple(state["biases"])))
