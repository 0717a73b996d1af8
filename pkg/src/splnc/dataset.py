"""Gridded pixel datasets and their text formats.

Pixel ``(x, y)`` is column ``x`` and row ``y``; arrays are indexed
``[y, x]`` and files are written row-major.
"""

import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from .errors import ShapeMismatch
from .features import N_FEATURES, coherency_from_entries, coherency_to_entries, feature_vector

SPLIT_NONE, SPLIT_TRAIN, SPLIT_TEST = 0, 1, 2
SPLIT_NAMES = ("none", "train", "test")

COHERENCY_HEADER = (
    "x", "y", "label", "split",
    "t11", "t22", "t33", "re_t12", "im_t12", "re_t13", "im_t13", "re_t23", "im_t23",
)
FEATURE_HEADER = ("x", "y", "label", "split") + tuple(f"f{k}" for k in range(1, N_FEATURES + 1))


@dataclass
class GridDataset:
    """A ``height x width`` raster of labelled pixels.

    At least one of ``coherency`` (shape ``(h, w, 3, 3)``) and ``features``
    (shape ``(h, w, 7)``) is present. ``labels`` uses 0 for unlabelled
    pixels; ``split`` holds ``SPLIT_*`` codes.
    """

    width: int
    height: int
    labels: np.ndarray
    split: np.ndarray
    coherency: np.ndarray = None
    features: np.ndarray = None

    def __post_init__(self):
        shape = (self.height, self.width)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.split = np.asarray(self.split, dtype=np.int8)
        if self.labels.shape != shape or self.split.shape != shape:
            raise ShapeMismatch(f"labels/split must have shape {shape}")
        if self.coherency is None and self.features is None:
            raise ValueError("dataset needs coherency matrices or features")
        if self.coherency is not None and self.coherency.shape != shape + (3, 3):
            raise ShapeMismatch("coherency array does not match the grid")
        if self.features is not None and self.features.shape != shape + (N_FEATURES,):
            raise ShapeMismatch("feature array does not match the grid")
        if np.any((self.split == SPLIT_TRAIN) & (self.labels <= 0)):
            raise ValueError("training pixels must be labelled")

    @property
    def train_mask(self):
        return self.split == SPLIT_TRAIN

    @property
    def test_mask(self):
        return self.split == SPLIT_TEST

    @property
    def labeled_mask(self):
        return self.labels > 0

    @property
    def training_fraction(self):
        n = int(self.labeled_mask.sum())
        return float(self.train_mask.sum()) / n if n else 0.0

    def class_ids(self, mask=None):
        lab = self.labels if mask is None else self.labels[mask]
        return [int(c) for c in np.unique(lab) if c > 0]

    def ensure_features(self):
        """Compute (once) and return the per-pixel feature array."""
        if self.features is None:
            self.features = feature_vector(self.coherency)
        return self.features

    def with_split(self, split):
        return replace(self, split=np.asarray(split, dtype=np.int8))

    def training_samples(self):
        """Features, labels and ``(x, y)`` coordinates of the training pixels."""
        F = self.ensure_features()
        ys, xs = np.nonzero(self.train_mask)
        return F[ys, xs], self.labels[ys, xs], np.stack([xs, ys], axis=1)


def _fmt(x):
    return repr(float(x))


def _grid_index(rows, width_height=None):
    xs = np.array([int(r[0]) for r in rows], dtype=np.int64)
    ys = np.array([int(r[1]) for r in rows], dtype=np.int64)
    if width_height is None:
        width, height = int(xs.max()) + 1, int(ys.max()) + 1
    else:
        width, height = width_height
    if xs.size != width * height:
        raise ShapeMismatch(f"{xs.size} rows do not cover a {width}x{height} grid")
    return xs, ys, width, height


def _write_rows(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(r) + "\n")
    return buf.getvalue()


def _row_prefix(ds, y, x):
    return [str(x), str(y), str(int(ds.labels[y, x])), SPLIT_NAMES[ds.split[y, x]]]


def coherency_csv(ds):
    """Serialise coherency matrices; floats use shortest round-trip repr."""
    if ds.coherency is None:
        raise ValueError("dataset has no coherency matrices")
    entries = coherency_to_entries(ds.coherency)
    rows = (
        _row_prefix(ds, y, x) + [_fmt(v) for v in entries[y, x]]
        for y in range(ds.height)
        for x in range(ds.width)
    )
    return _write_rows(COHERENCY_HEADER, rows)


def feature_csv(ds):
    F = ds.ensure_features()
    rows = (
        _row_prefix(ds, y, x) + [_fmt(v) for v in F[y, x]]
        for y in range(ds.height)
        for x in range(ds.width)
    )
    return _write_rows(FEATURE_HEADER, rows)


def parse_dataset_csv(text):
    """Read either the coherency or the feature CSV layout."""
    reader = csv.reader(io.StringIO(text))
    header = tuple(h.strip() for h in next(reader))
    if header not in (COHERENCY_HEADER, FEATURE_HEADER):
        raise ValueError(f"unrecognised dataset header: {','.join(header)}")
    rows = [r for r in reader if r]
    ncol = len(header)
    for k, r in enumerate(rows, start=2):
        if len(r) != ncol:
            raise ValueError(f"line {k}: expected {ncol} fields, got {len(r)}")
    xs, ys, width, height = _grid_index(rows)
    labels = np.zeros((height, width), dtype=np.int64)
    split = np.zeros((height, width), dtype=np.int8)
    values = np.array([[float(v) for v in r[4:]] for r in rows])
    labels[ys, xs] = [int(r[2]) for r in rows]
    split[ys, xs] = [SPLIT_NAMES.index(r[3].strip()) for r in rows]
    grid = np.zeros((height, width, values.shape[1]))
    grid[ys, xs] = values
    if header == COHERENCY_HEADER:
        return GridDataset(width, height, labels, split, coherency=coherency_from_entries(grid))
    return GridDataset(width, height, labels, split, features=grid)


def write_dataset(ds, path, kind="coherency"):
    text = coherency_csv(ds) if kind == "coherency" else feature_csv(ds)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_dataset(path):
    with open(path, encoding="utf-8") as fh:
        return parse_dataset_csv(fh.read())


def label_map_text(labels):
    """Plain-text integer map: ``width height`` header, then rows."""
    labels = np.asarray(labels, dtype=np.int64)
    h, w = labels.shape
    lines = [f"{w} {h}"] + [" ".join(str(int(v)) for v in row) for row in labels]
    return "\n".join(lines) + "\n"


def parse_label_map(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    w, h = (int(t) for t in lines[0].split())
    rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
    arr = np.array(rows, dtype=np.int64)
    if arr.shape != (h, w):
        raise ShapeMismatch(f"label map body is {arr.shape}, header says {(h, w)}")
    return arr


def write_label_map(labels, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(label_map_text(labels))


def read_label_map(path):
    with open(path, encoding="utf-8") as fh:
        return parse_label_map(fh.read())
