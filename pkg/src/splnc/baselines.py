"""Reference classifiers: an unweighted one-vs-rest SVM and the Wishart
nearest-centre classifier."""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyClass, SingularCenter, TooFewClasses
from .svm import fit_svm
from .trainer import MulticlassModel, _prepare

# relative eigenvalue floor below which a centre is regularised
CENTER_FLOOR = 1e-9


def train_plain_svm(dataset, config):
    """One-vs-rest SVM with every sample weight fixed at 1."""
    F, labels, _, classes, stats = _prepare(dataset, config)
    ones = np.ones(labels.size)
    models = []
    for cid in classes:
        y = np.where(labels == cid, 1.0, -1.0)
        model, _ = fit_svm(F, y, ones, config.c, config.kernel, tol=config.tol)
        models.append(model)
    return MulticlassModel(tuple(classes), models, stats, config.to_dict(), "svm")


@dataclass(frozen=True)
class WishartCenters:
    class_ids: tuple
    centers: np.ndarray
    inverses: np.ndarray
    logdets: np.ndarray

    @classmethod
    def from_centers(cls, class_ids, centers):
        """Validate and invert the class means.

        ``centers`` keeps the means as given; the inverse and log-determinant
        come from a copy regularised with ``1e-9 * trace / 3 * I`` when its
        smallest eigenvalue is below ``1e-9 * trace``.
        """
        centers = np.array(centers, dtype=complex)
        inverses = np.empty_like(centers)
        logdets = np.empty(centers.shape[0])
        for k, S in enumerate(centers):
            S = 0.5 * (S + S.conj().T)
            tr = float(np.trace(S).real)
            if not tr > 0:
                raise SingularCenter(f"class {class_ids[k]} centre has non-positive trace")
            if np.linalg.eigvalsh(S).min() < CENTER_FLOOR * tr:
                S = S + CENTER_FLOOR * tr / 3.0 * np.eye(3)
            sign, logdet = np.linalg.slogdet(S)
            if sign.real <= 0 or not np.isfinite(logdet):
                raise SingularCenter(f"class {class_ids[k]} centre is singular")
            inverses[k] = np.linalg.inv(S)
            logdets[k] = logdet
        return cls(tuple(int(c) for c in class_ids), centers, inverses, logdets)


def wishart_centers(dataset):
    """Per-class mean coherency matrix over the training pixels."""
    if dataset.coherency is None:
        raise ValueError("the Wishart classifier needs coherency matrices")
    mask = dataset.train_mask
    classes = dataset.class_ids(mask)
    if len(classes) < 2:
        raise TooFewClasses("need at least two labelled classes in the training mask")
    centers = []
    for cid in classes:
        sel = mask & (dataset.labels == cid)
        if not sel.any():
            raise EmptyClass(f"class {cid} has no training pixels")
        centers.append(dataset.coherency[sel].mean(axis=0))
    return WishartCenters.from_centers(classes, centers)


def wishart_distances(T, centers):
    """``ln|S_m| + tr(S_m^-1 T)`` for every matrix and class, shape ``(..., K)``."""
    T = np.asarray(T, dtype=complex)
    tr = np.einsum("kij,...ji->...k", centers.inverses, T).real
    return centers.logdets + tr


def wishart_classify(T, centers):
    """Nearest-centre class id; ties go to the lowest class id."""
    d = wishart_distances(T, centers)
    return np.asarray(centers.class_ids)[np.argmin(d, axis=-1)]


def predict_wishart(centers, dataset):
    return wishart_classify(dataset.coherency, centers)
