"""JSON model artifacts and atomic file writes."""

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .classifiers import MODEL_KINDS, model_from_state
from .data import ScalerParams, apply_standardizer, Dataset
from .errors import (ArtifactFormatError, ArtifactShapeError, DataError,
                     UnsupportedVersionError)

SCHEMA_VERSION = 1


def atomic_write_text(path, text):
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def atomic_write_json(path, obj):
    atomic_write_text(path, dumps(obj))


@dataclass
class ModelArtifact:
    kind: str
    hyperparameters: dict
    state: dict
    feature_names: tuple
    scaler: object = None  # ScalerParams or None
    seed: int = 0
    schema_version: int = SCHEMA_VERSION
    _model: object = field(default=None, repr=False, compare=False)

    @classmethod
    def from_model(cls, model, hyperparameters, feature_names, scaler=None, seed=0):
        art = cls(model.kind, dict(hyperparameters), model.get_state(), tuple(feature_names), scaler, seed)
        art._model = model
        return art

    @property
    def model(self):
        if self._model is None:
            self._model = model_from_state(self.kind, self.state)
        return self._model

    def _prepare(self, X):
        X = np.asarray(getattr(X, "features", X), dtype=np.float64)
        if self.scaler is not None:
            X = apply_standardizer(Dataset(X, np.zeros(X.shape[0], dtype=np.int64),
                                           self.feature_names), self.scaler).features
        return X

    def predict_proba(self, X):
        """Scale raw features with the stored scaler, then score."""
        return self.model.predict_proba(self._prepare(X))

    def predict(self, X, threshold=0.5):
        return self.model.predict(self._prepare(X), threshold)

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "hyperparameters": self.hyperparameters,
            "seed": self.seed,
            "feature_names": list(self.feature_names),
            "scaler": None if self.scaler is None else self.scaler.to_dict(),
            "params": self.state,
        }


def save_model(artifact, path):
    atomic_write_json(path, artifact.to_dict())


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ArtifactFormatError(f"{path}: malformed model file ({exc})") from None
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ArtifactFormatError(f"{path}: not a model artifact")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise UnsupportedVersionError(
            f"{path}: schema_version {doc['schema_version']!r} unsupported (expected {SCHEMA_VERSION})")
    try:
        scaler = None if doc.get("scaler") is None else ScalerParams.from_dict(doc["scaler"])
        art = ModelArtifact(doc["kind"], doc["hyperparameters"], doc["params"],
                            tuple(doc["feature_names"]), scaler, int(doc["seed"]))
    except KeyError as exc:
        raise ArtifactFormatError(f"{path}: missing field {exc}") from None
    except (DataError, ValueError, TypeError) as exc:
        raise ArtifactShapeError(f"{path}: bad scaler block ({exc})") from None
    if art.kind not in MODEL_KINDS:
        raise ArtifactFormatError(f"{path}: unknown model kind {art.kind!r}")
    n_in = len(art.feature_names)
    try:
        # rebuild eagerly and probe once so shape problems surface at load time
        art.model.predict_proba(np.zeros((1, n_in)))
    except (DataError, KeyError, ValueError, TypeError, IndexError) as exc:
        raise ArtifactShapeError(f"{path}: inconsistent model parameters ({exc})") from None
    if scaler is not None and scaler.n_features != n_in:
        raise ArtifactShapeError(f"{path}: scaler covers {scaler.n_features} features, model has {n_in}")
    return art
