import numpy as np
import pytest

from splnc.dataset import (
    COHERENCY_HEADER,
    FEATURE_HEADER,
    GridDataset,
    coherency_csv,
    label_map_text,
    parse_dataset_csv,
    parse_label_map,
    read_dataset,
    read_label_map,
    write_dataset,
    write_label_map,
)
from splnc.errors import ShapeMismatch
from splnc.scene import SceneSpec, generate_scene


@pytest.fixture
def scene():
    return generate_scene(SceneSpec(width=9, height=7, n_classes=3, seed=12, train_fraction=0.1))


def test_coherency_round_trip(tmp_path, scene):
    path = tmp_path / "scene.csv"
    write_dataset(scene, path, "coherency")
    back = read_dataset(path)
    assert np.array_equal(back.coherency, scene.coherency)
    assert np.array_equal(back.labels, scene.labels)
    assert np.array_equal(back.split, scene.split)
    text = path.read_bytes()
    assert text.startswith(",".join(COHERENCY_HEADER).encode() + b"\n")
    assert b"\r" not in text


def test_feature_round_trip(tmp_path, scene):
    path = tmp_path / "feat.csv"
    write_dataset(scene, path, "features")
    back = read_dataset(path)
    assert back.coherency is None
    assert np.array_equal(back.features, scene.ensure_features())
    assert path.read_text().split("\n", 1)[0] == ",".join(FEATURE_HEADER)


def test_rows_are_row_major(scene):
    rows = coherency_csv(scene).splitlines()[1:4]
    assert [r.split(",")[:2] for r in rows] == [["0", "0"], ["1", "0"], ["2", "0"]]


def test_unordered_rows_parse(scene):
    lines = coherency_csv(scene).splitlines()
    shuffled = [lines[0]] + lines[1:][::-1]
    back = parse_dataset_csv("\n".join(shuffled) + "\n")
    assert np.array_equal(back.coherency, scene.coherency)


def test_bad_inputs(scene):
    with pytest.raises(ValueError):
        parse_dataset_csv("a,b,c\n1,2,3\n")
    text = coherency_csv(scene).splitlines()
    text[2] = ",".join(text[2].split(",")[:-1])
    with pytest.raises(ValueError):
        parse_dataset_csv("\n".join(text))
    with pytest.raises(ShapeMismatch):
        GridDataset(3, 2, np.zeros((3, 3)), np.zeros((3, 3)), features=np.zeros((2, 3, 7)))
    with pytest.raises(ValueError):
        GridDataset(2, 1, np.array([[0, 1]]), np.array([[1, 0]]), features=np.zeros((1, 2, 7)))


def test_label_map_round_trip(tmp_path):
    labels = np.array([[0, 1, 2], [3, 3, 1]])
    assert label_map_text(labels) == "3 2\n0 1 2\n3 3 1\n"
    path = tmp_path / "map.txt"
    write_label_map(labels, path)
    assert np.array_equal(read_label_map(path), labels)
    with pytest.raises(ShapeMismatch):
        parse_label_map("3 3\n0 1 2\n")


def test_training_samples(scene):
    F, labels, coords = scene.training_samples()
    assert F.shape == (int(scene.train_mask.sum()), 7)
    xs, ys = coords[:, 0], coords[:, 1]
    assert np.all(scene.train_mask[ys, xs])
    assert np.array_equal(labels, scene.labels[ys, xs])
