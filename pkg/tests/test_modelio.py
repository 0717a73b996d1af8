import json

import numpy as np
import pytest

from splnc.baselines import predict_wishart, train_plain_svm, wishart_centers
from splnc.modelio import FORMAT_VERSION, load_model, model_from_dict, model_to_dict, save_model
from splnc.scene import SceneSpec, generate_scene
from splnc.trainer import TrainerConfig, predict, train_multiclass


@pytest.fixture(scope="module")
def scene():
    ds = generate_scene(SceneSpec(width=24, height=24, n_classes=3, seed=2, train_fraction=0.1))
    ds.ensure_features()
    return ds


def test_spl_model_round_trip(tmp_path, scene):
    model, _ = train_multiclass(scene, TrainerConfig(c=10.0, gamma=0.5, seed=4))
    path = tmp_path / "m.json"
    save_model(model, path)
    back = load_model(path)
    assert np.array_equal(predict(back, scene), predict(model, scene))
    F = scene.features.reshape(-1, 7)
    assert np.array_equal(back.decision_matrix(F), model.decision_matrix(F))
    doc = json.loads(path.read_text())
    assert doc["format_version"] == FORMAT_VERSION and doc["kind"] == "svm"
    assert doc["config"]["c"] == 10.0 and doc["method"] == "svm_splnc"
    assert len(doc["normalization"]["mean"]) == 7


def test_unnormalized_svm_round_trip(tmp_path, scene):
    model = train_plain_svm(scene, TrainerConfig(normalize=False, gamma=0.01))
    back = model_from_dict(json.loads(json.dumps(model_to_dict(model))))
    assert back.stats is None
    assert np.array_equal(predict(back, scene), predict(model, scene))


def test_wishart_round_trip(tmp_path, scene):
    centers = wishart_centers(scene)
    path = tmp_path / "wc.json"
    save_model(centers, path)
    back = load_model(path)
    assert np.array_equal(back.centers, centers.centers)
    assert np.array_equal(predict_wishart(back, scene), predict_wishart(centers, scene))


def test_rejects_foreign_documents(scene):
    doc = model_to_dict(wishart_centers(scene))
    with pytest.raises(ValueError):
        model_from_dict({**doc, "format_version": FORMAT_VERSION + 1})
    with pytest.raises(ValueError):
        model_from_dict({**doc, "format": "other"})
