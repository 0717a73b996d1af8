"""Accuracy assessment and class-map rendering."""

from dataclasses import dataclass

import numpy as np

from .dataset import SPLIT_TRAIN
from .errors import EmptyEvaluation, PaletteTooSmall, ShapeMismatch, UnknownPredictedClass

EVAL_MODES = ("test", "all-labeled")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = true class and columns = predicted class."""

    counts: np.ndarray
    classes: tuple

    @property
    def total(self):
        return int(self.counts.sum())


def confusion_matrix(predicted, truth, split=None, mode="test", classes=None):
    """Count (true, predicted) pairs over the evaluated pixels.

    Parameters
    ----------
    predicted, truth : array_like of int
        Label maps of equal shape; truth 0 means unlabelled.
    split : array_like, optional
        Split codes; in ``test`` mode training pixels are skipped. Required
        for ``test`` mode.
    mode : {"test", "all-labeled"}
    classes : sequence of int, optional
        Class ids in matrix order; defaults to the sorted labelled truth ids.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ShapeMismatch(f"prediction {predicted.shape} vs truth {truth.shape}")
    if mode not in EVAL_MODES:
        raise ValueError(f"mode must be one of {EVAL_MODES}")
    mask = truth > 0
    if mode == "test":
        if split is None:
            raise ValueError("test mode needs the split map")
        split = np.asarray(split)
        if split.shape != truth.shape:
            raise ShapeMismatch("split map does not match the truth map")
        mask &= split != SPLIT_TRAIN
    if classes is None:
        classes = sorted(int(c) for c in np.unique(truth[truth > 0]))
    classes = tuple(int(c) for c in classes)
    index = {c: k for k, c in enumerate(classes)}
    t = truth[mask]
    p = predicted[mask]
    unknown = set(np.unique(p).tolist()) - set(classes)
    if unknown:
        raise UnknownPredictedClass(f"predicted classes {sorted(unknown)} not in {classes}")
    if set(np.unique(t).tolist()) - set(classes):
        raise ValueError("truth contains classes outside the class list")
    ti = np.array([index[int(v)] for v in t], dtype=np.int64)
    pi = np.array([index[int(v)] for v in p], dtype=np.int64)
    K = len(classes)
    counts = np.bincount(ti * K + pi, minlength=K * K).reshape(K, K)
    return ConfusionMatrix(counts, classes)


def oa_aa(cm):
    """Overall accuracy, average accuracy and per-class accuracies.

    Classes without true pixels get ``None`` in the per-class list and are
    left out of the average.
    """
    counts = np.asarray(cm.counts)
    total = counts.sum()
    if total == 0:
        raise EmptyEvaluation("no pixels were evaluated")
    rows = counts.sum(axis=1)
    diag = np.diag(counts)
    per_class = [float(d) / r if r > 0 else None for d, r in zip(diag, rows)]
    present = [a for a in per_class if a is not None]
    return float(diag.sum()) / float(total), float(np.mean(present)), per_class


def default_palette(n_classes):
    """Black background plus ``n_classes`` distinct colours."""
    base = [
        (255, 0, 0), (0, 160, 0), (0, 0, 255), (255, 200, 0), (0, 200, 200),
        (200, 0, 200), (255, 128, 0), (128, 64, 0), (128, 128, 255), (0, 100, 60),
        (255, 150, 180), (150, 150, 0), (90, 0, 140), (200, 200, 200),
    ]
    colours = [(0, 0, 0)]
    for k in range(n_classes):
        colours.append(base[k % len(base)])
    return colours


def render_class_map(labels, palette):
    """Binary PPM (P6) image of a label map.

    ``palette[k]`` is the RGB colour of label ``k``; label 0 is always
    drawn black.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 2:
        raise ShapeMismatch("label map must be 2-D")
    pal = np.array(palette, dtype=np.uint8).reshape(-1, 3).copy()
    if labels.size and (labels.min() < 0 or labels.max() >= len(pal)):
        raise PaletteTooSmall(f"palette has {len(pal)} entries, map needs {int(labels.max()) + 1}")
    if len(pal):
        pal[0] = 0
    h, w = labels.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + pal[labels].tobytes()
