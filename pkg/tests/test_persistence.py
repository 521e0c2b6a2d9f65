import json

import numpy as np
import pytest

from conftest import blobs
from fraudnet.classifiers import MODEL_KINDS, fit_model
from fraudnet.data import fit_standardizer
from fraudnet.errors import ArtifactFormatError, ArtifactShapeError, UnsupportedVersionError
from fraudnet.persistence import ModelArtifact, atomic_write_text, load_model, save_model

FAST = {"nn": {"epochs": 3}, "lr": {"epochs": 40}, "svm": {"iterations": 1000}}


def saved(tmp_path, kind="lr"):
    ds = blobs(60, 2.0, d=3, seed=1)
    scaler = fit_standardizer(ds, [0, 2])
    model = fit_model(kind, ds, FAST.get(kind), seed=3)
    art = ModelArtifact.from_model(model, FAST.get(kind, {}), ds.feature_names, scaler, seed=3)
    path = tmp_path / f"{kind}.json"
    save_model(art, path)
    return art, path


@pytest.mark.parametrize("kind", MODEL_KINDS)
def test_round_trip_bit_identical(tmp_path, kind):
    art, path = saved(tmp_path, kind)
    X = np.random.default_rng(0).normal(size=(100, 3)) * 4
    loaded = load_model(path)
    assert loaded.predict_proba(X).tobytes() == art.predict_proba(X).tobytes()
    assert loaded.kind == kind and loaded.seed == 3
    assert loaded.scaler.columns == art.scaler.columns


def test_resave_is_byte_identical(tmp_path):
    _, path = saved(tmp_path, "tree")
    again = tmp_path / "again.json"
    save_model(load_model(path), again)
    assert again.read_bytes() == path.read_bytes()


def test_unsupported_version(tmp_path):
    _, path = saved(tmp_path)
    doc = json.loads(path.read_text())
    doc["schema_version"] = 999
    path.write_text(json.dumps(doc))
    with pytest.raises(UnsupportedVersionError):
        load_model(path)


def test_truncated_file(tmp_path):
    _, path = saved(tmp_path)
    path.write_text(path.read_text()[:40])
    with pytest.raises(ArtifactFormatError):
        load_model(path)


def test_unknown_kind_and_missing_field(tmp_path):
    _, path = saved(tmp_path)
    doc = json.loads(path.read_text())
    bad = dict(doc, kind="forest")
    path.write_text(json.dumps(bad))
    with pytest.raises(ArtifactFormatError):
        load_model(path)
    del doc["params"]
    path.write_text(json.dumps(doc))
    with pytest.raises(ArtifactFormatError):
        load_model(path)


def test_shape_inconsistency(tmp_path):
    _, path = saved(tmp_path, "nn")
    doc = json.loads(path.read_text())
    doc["params"]["weights"][0] = doc["params"]["weights"][0][:-1]
    path.write_text(json.dumps(doc))
    with pytest.raises(ArtifactShapeError):
        load_model(path)


def test_scaler_width_mismatch(tmp_path):
    _, path = saved(tmp_path)
    doc = json.loads(path.read_text())
    doc["scaler"]["n_features"] = 7
    path.write_text(json.dumps(doc))
    with pytest.raises(ArtifactShapeError):
        load_model(path)


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "x.txt"
    atomic_write_text(target, "one")
    atomic_write_text(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
