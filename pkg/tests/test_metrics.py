import numpy as np
import pytest

from oracles import naive_confusion
from splnc.dataset import SPLIT_TEST, SPLIT_TRAIN
from splnc.errors import EmptyEvaluation, PaletteTooSmall, ShapeMismatch, UnknownPredictedClass
from splnc.metrics import ConfusionMatrix, confusion_matrix, default_palette, oa_aa, render_class_map


def test_perfect_and_constant():
    truth = np.array([1] * 12 + [2] * 8).reshape(4, 5)
    cm = confusion_matrix(truth, truth, mode="all-labeled")
    assert np.array_equal(cm.counts, [[12, 0], [0, 8]])
    cm = confusion_matrix(np.ones_like(truth), truth, mode="all-labeled")
    assert np.array_equal(cm.counts, [[12, 0], [8, 0]])


def test_against_naive_oracle():
    rng = np.random.default_rng(0)
    for _ in range(10):
        truth = rng.integers(0, 5, size=(13, 11))
        pred = rng.integers(1, 5, size=(13, 11))
        split = np.where(rng.random((13, 11)) < 0.2, SPLIT_TRAIN, SPLIT_TEST)
        classes = [1, 2, 3, 4]
        cm = confusion_matrix(pred, truth, split, mode="test", classes=classes)
        assert np.array_equal(cm.counts, naive_confusion(pred, truth, split, classes, SPLIT_TRAIN))
        assert cm.total == int(np.sum((truth > 0) & (split != SPLIT_TRAIN)))
        cm = confusion_matrix(pred, truth, split, mode="all-labeled", classes=classes)
        assert np.array_equal(cm.counts, naive_confusion(pred, truth, split, classes))


def test_confusion_errors():
    t = np.ones((2, 2), dtype=int)
    with pytest.raises(ShapeMismatch):
        confusion_matrix(np.ones((2, 3)), t, mode="all-labeled")
    with pytest.raises(UnknownPredictedClass):
        confusion_matrix(np.full((2, 2), 9), t, mode="all-labeled")
    with pytest.raises(ValueError):
        confusion_matrix(t, t, mode="test")
    with pytest.raises(ValueError):
        confusion_matrix(t, t, mode="train")


def test_oa_aa():
    oa, aa, per = oa_aa(ConfusionMatrix(np.array([[8, 2], [1, 9]]), (1, 2)))
    assert per == [0.8, 0.9]
    assert oa == pytest.approx(0.85) and aa == pytest.approx(0.85)
    oa, aa, per = oa_aa(ConfusionMatrix(np.diag([3, 4, 5]), (1, 2, 3)))
    assert oa == aa == 1.0
    oa, aa, per = oa_aa(ConfusionMatrix(np.array([[4, 1, 0], [0, 0, 0], [1, 0, 4]]), (1, 2, 3)))
    assert per[1] is None
    assert aa == pytest.approx(0.8) and oa == pytest.approx(0.8)
    with pytest.raises(EmptyEvaluation):
        oa_aa(ConfusionMatrix(np.zeros((2, 2), dtype=int), (1, 2)))


def test_oa_is_row_weighted_mean():
    rng = np.random.default_rng(1)
    counts = rng.integers(0, 20, size=(5, 5))
    oa, aa, per = oa_aa(ConfusionMatrix(counts, tuple(range(1, 6))))
    rows = counts.sum(axis=1)
    assert abs(oa - sum(p * r for p, r in zip(per, rows)) / rows.sum()) < 1e-15
    assert 0 <= oa <= 1 and 0 <= aa <= 1


def test_ppm_bytes():
    pal = [(0, 0, 0), (255, 0, 0)]
    img = render_class_map(np.array([[1]]), pal)
    # 11-byte header "P6\n1 1\n255\n" plus one RGB triple
    assert img == b"P6\n1 1\n255\n\xff\x00\x00"
    assert len(img) == 14
    black = render_class_map(np.zeros((2, 3), dtype=int), default_palette(3))
    assert black == b"P6\n3 2\n255\n" + bytes(18)
    lab = np.array([[0, 1], [2, 1]])
    assert render_class_map(lab, default_palette(2)) == render_class_map(lab, default_palette(2))
    # label 0 stays black even if the palette says otherwise
    assert render_class_map(np.zeros((1, 1), dtype=int), [(9, 9, 9)])[-3:] == b"\x00\x00\x00"
    with pytest.raises(PaletteTooSmall):
        render_class_map(np.array([[3]]), pal)


def test_default_palette():
    pal = default_palette(14)
    assert pal[0] == (0, 0, 0) and len(pal) == 15
    assert len(set(pal)) == 15
