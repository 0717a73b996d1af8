"""Synthetic PolSAR-like scenes with complex-Wishart speckle.

Randomness
----------
Speckle comes from a Philox-4x64 counter generator keyed by the scene
seed. Uniform doubles are the top 53 bits of each 64-bit output
(``numpy.random.Generator.random``) and Gaussian pairs are made with the
Box-Muller transform ``r = sqrt(-2 ln(1 - u1))``, ``(r cos 2 pi u2,
r sin 2 pi u2)``, which becomes the real and imaginary part of one complex
normal. Pixel ``p`` (row-major) at ``L`` looks consumes uniforms
``[6 L p, 6 L (p + 1))``, so any contiguous pixel range can be regenerated
independently by advancing the stream.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dataset import SPLIT_NONE, SPLIT_TEST, SPLIT_TRAIN, GridDataset
from .errors import BadSimilarity, FractionTooLargeForClass, NotPositiveDefinite
from .features import coherency_from_entries

LAYOUTS = ("stripes", "voronoi", "blocks")

# Class prototype coherency matrices, storage order
# t11, t22, t33, re_t12, im_t12, re_t13, im_t13, re_t23, im_t23.
# Hand-set mixes of odd-bounce (t11 dominant), double-bounce (t22
# dominant) and random-volume (t11:t22:t33 near 2:1:1) scattering, at
# different total powers. Frozen: acceptance benchmarks depend on them.
PROTOTYPES = np.array(
    [
        [1.00, 0.10, 0.030, 0.20, 0.02, 0.00, 0.00, 0.00, 0.00],  # smooth surface
        [0.40, 1.20, 0.100, -0.30, 0.15, 0.00, 0.00, 0.02, 0.00],  # dihedral
        [0.80, 0.45, 0.400, 0.05, 0.00, 0.00, 0.00, 0.00, 0.00],  # volume
        [1.10, 0.30, 0.180, 0.25, -0.05, 0.00, 0.00, 0.00, 0.00],  # crop, surface + volume
        [0.15, 0.010, 0.004, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00],  # calm water
        [0.50, 0.70, 0.350, 0.10, 0.05, 0.00, 0.08, 0.12, 0.00],  # oriented built-up
        [0.60, 0.20, 0.120, 0.12, 0.03, 0.00, 0.00, 0.00, 0.00],  # grass
        [0.55, 0.65, 0.250, -0.10, 0.00, 0.00, 0.00, 0.03, 0.02],  # dihedral + volume
        [1.40, 0.60, 0.500, 0.15, 0.10, 0.00, 0.00, 0.00, 0.00],  # dense forest
        [0.30, 0.08, 0.050, 0.06, 0.00, 0.00, 0.00, 0.00, 0.00],  # dry bare soil
        [0.90, 0.90, 0.200, 0.00, 0.20, 0.00, 0.00, 0.00, 0.00],  # surface / dihedral mix
        [0.70, 0.35, 0.300, 0.00, 0.00, 0.05, 0.00, 0.00, 0.00],  # sparse vegetation
        [2.00, 1.50, 0.600, -0.40, 0.00, 0.00, 0.00, 0.10, 0.00],  # bright urban
        [0.25, 0.15, 0.120, 0.03, 0.00, 0.00, 0.00, 0.00, 0.00],  # rough, low return
    ]
)
MAX_CLASSES = PROTOTYPES.shape[0]


@dataclass(frozen=True)
class SceneSpec:
    width: int = 64
    height: int = 64
    n_classes: int = 5
    layout: str = "voronoi"
    voronoi_seeds: int = 15
    looks: int = 4
    similarity: float = 0.6
    seed: int = 0
    train_fraction: float = 0.02
    block_size: int = 3

    def __post_init__(self):
        if not 2 <= self.n_classes <= MAX_CLASSES:
            raise ValueError(f"class count must be in [2, {MAX_CLASSES}]")
        if self.width < 1 or self.height < 1 or self.width * self.height < self.n_classes:
            raise ValueError("grid too small for the class count")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}")
        if self.layout == "voronoi" and self.voronoi_seeds < self.n_classes:
            raise ValueError("voronoi layout needs at least one seed per class")
        if int(self.looks) != self.looks or self.looks < 1:
            raise ValueError("looks must be a positive integer")
        if not 0 <= self.similarity <= 1:
            raise BadSimilarity("similarity must lie in [0, 1]")


def builtin_class_sigmas(n_classes, similarity):
    """Class covariances blended toward their common mean.

    ``sigma_k(s) = (1 - s) * prototype_k + s * mean(prototypes)`` over the
    first ``n_classes`` prototypes; ``s = 1`` makes every class identical.
    """
    if not 0 <= similarity <= 1:
        raise BadSimilarity("similarity must lie in [0, 1]")
    if not 2 <= n_classes <= MAX_CLASSES:
        raise ValueError(f"class count must be in [2, {MAX_CLASSES}]")
    protos = coherency_from_entries(PROTOTYPES[:n_classes])
    mean = protos.mean(axis=0)
    return (1.0 - similarity) * protos + similarity * mean


def make_rng(seed):
    """Philox generator used for all scene randomness."""
    return np.random.Generator(np.random.Philox(seed))


def _complex_normals(rng, shape):
    u = rng.random(shape + (2,))
    r = np.sqrt(-2.0 * np.log1p(-u[..., 0]))
    ang = 2.0 * np.pi * u[..., 1]
    # unit variance per complex entry: E|z|^2 = 1
    return (r * np.cos(ang) + 1j * r * np.sin(ang)) / np.sqrt(2.0)


def sample_wishart_coherency(sigma, looks, rng, size=None):
    """Draw multilook coherency matrices with expectation ``sigma``.

    ``T = (1/L) sum_k z_k z_k^H`` with ``z_k = chol(sigma) n_k`` and
    ``n_k`` standard circular complex normals.

    Parameters
    ----------
    sigma : array_like, shape (3, 3)
    looks : int
    rng : numpy.random.Generator
    size : int or tuple, optional
        Number of independent draws; ``None`` returns a single matrix.
    """
    sigma = np.asarray(sigma, dtype=complex)
    if int(looks) != looks or looks < 1:
        raise ValueError("looks must be a positive integer")
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("covariance is not positive definite") from exc
    shape = () if size is None else ((size,) if np.isscalar(size) else tuple(size))
    n = _complex_normals(rng, shape + (int(looks), 3))
    z = n @ chol.T
    T = np.einsum("...ki,...kj->...ij", z, z.conj()) / looks
    return T


def _layout(spec, rng):
    h, w = spec.height, spec.width
    yy, xx = np.mgrid[0:h, 0:w]
    K = spec.n_classes
    if spec.layout == "stripes":
        # horizontal bands of near-equal height, class 1 on top
        return 1 + (yy * K) // h
    if spec.layout == "blocks":
        t = int(np.ceil(np.sqrt(K)))
        tile = (yy * t // h) * t + (xx * t // w)
        return 1 + tile % K
    pts = rng.random((spec.voronoi_seeds, 2)) * [w, h]
    cls = 1 + np.arange(spec.voronoi_seeds) % K
    d = (xx[..., None] + 0.5 - pts[:, 0]) ** 2 + (yy[..., None] + 0.5 - pts[:, 1]) ** 2
    return cls[np.argmin(d, axis=-1)]


def generate_scene(spec):
    """Build a labelled scene with speckled coherency matrices.

    The layout, the speckle and the training mask each draw from their own
    stream spawned from ``spec.seed``.
    """
    ss_layout, ss_speckle, ss_mask = np.random.SeedSequence(spec.seed).spawn(3)
    labels = _layout(spec, make_rng(ss_layout))
    sigmas = builtin_class_sigmas(spec.n_classes, spec.similarity)
    chols = np.linalg.cholesky(sigmas)

    npix = spec.width * spec.height
    n = _complex_normals(make_rng(ss_speckle), (npix, spec.looks, 3))
    chol_pix = chols[labels.ravel() - 1]
    z = np.einsum("pij,pkj->pki", chol_pix, n)
    T = np.einsum("pki,pkj->pij", z, z.conj()) / spec.looks
    T = T.reshape(spec.height, spec.width, 3, 3)

    split = np.full(labels.shape, SPLIT_TEST, dtype=np.int8)
    ds = GridDataset(spec.width, spec.height, labels, split, coherency=T)
    if spec.train_fraction is None:
        return ds
    return sample_training_mask(ds, spec.train_fraction, spec.block_size, make_rng(ss_mask))


def sample_training_mask(dataset, fraction, block_size, rng):
    """Mark square training blocks inside each class.

    Blocks are placed uniformly among positions lying fully inside the
    class and not overlapping earlier blocks. Placement continues while
    another block would bring the count closer to ``fraction`` of the
    class size, with at least one block per class. When no position fits,
    the block side shrinks by one.

    Returns a new dataset whose labelled pixels are split into train/test.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    if block_size < 1:
        raise ValueError("block size must be at least 1")
    labels = dataset.labels
    train = np.zeros(labels.shape, dtype=bool)
    for cid in dataset.class_ids():
        cls = labels == cid
        target = fraction * cls.sum()
        count = 0
        size = block_size
        valid = None
        while count == 0 or count + 0.5 * size * size < target:
            if valid is None:
                free = cls & ~train
                if size > min(labels.shape):
                    valid = np.zeros((1, 1), dtype=bool)
                else:
                    win = sliding_window_view(free, (size, size))
                    valid = win.all(axis=(-2, -1))
            cand = np.flatnonzero(valid)
            if cand.size == 0:
                if size == 1:
                    raise FractionTooLargeForClass(f"class {cid} has no room for more training pixels")
                size -= 1
                valid = None
                continue
            pos = int(cand[rng.integers(cand.size)])
            r, c = divmod(pos, valid.shape[1])
            train[r : r + size, c : c + size] = True
            count += size * size
            # drop positions whose block would overlap the new one
            valid[max(r - size + 1, 0) : r + size, max(c - size + 1, 0) : c + size] = False

    split = np.where(train, SPLIT_TRAIN, np.where(labels > 0, SPLIT_TEST, SPLIT_NONE))
    return dataset.with_split(split)
