"""Per-pixel polarimetric features from 3x3 coherency matrices.

Coherency matrices are handled as complex arrays of shape ``(..., 3, 3)``.
The eigensolver is a cyclic complex Jacobi iteration applied in the fixed
pair order (0,1), (0,2), (1,2); it is vectorised over the leading axes but
every pixel evolves independently, so a pixel gets bit-identical results
whether it is decomposed alone or inside a batch.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpan, DimensionMismatch, EmptyInput, NonFiniteInput, NotPSD

N_FEATURES = 7
FEATURE_NAMES = ("lambda1", "lambda2", "lambda3", "span", "entropy", "alpha", "anisotropy")

# relative slack on negative eigenvalues, scaled by the trace
PSD_SLACK = 1e-9
# relative size below which a computed eigenvalue is treated as exactly zero
ROUNDOFF_FLOOR = 64 * np.finfo(float).eps
_JACOBI_PAIRS = ((0, 1), (0, 2), (1, 2))
_JACOBI_MAX_SWEEPS = 50
_JACOBI_TOL = 1e-15


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues sorted descending and the matching unit eigenvectors.

    ``eigenvectors[..., :, k]`` pairs with ``eigenvalues[..., k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def coherency_from_entries(entries):
    """Build Hermitian matrices from the 9-real storage layout.

    Parameters
    ----------
    entries : array_like, shape (..., 9)
        ``t11, t22, t33, re_t12, im_t12, re_t13, im_t13, re_t23, im_t23``.

    Returns
    -------
    ndarray, shape (..., 3, 3), complex
    """
    e = np.asarray(entries, dtype=float)
    if e.shape[-1] != 9:
        raise ValueError("coherency entries need 9 values per pixel")
    T = np.zeros(e.shape[:-1] + (3, 3), dtype=complex)
    T[..., 0, 0] = e[..., 0]
    T[..., 1, 1] = e[..., 1]
    T[..., 2, 2] = e[..., 2]
    t12 = e[..., 3] + 1j * e[..., 4]
    t13 = e[..., 5] + 1j * e[..., 6]
    t23 = e[..., 7] + 1j * e[..., 8]
    T[..., 0, 1], T[..., 1, 0] = t12, np.conj(t12)
    T[..., 0, 2], T[..., 2, 0] = t13, np.conj(t13)
    T[..., 1, 2], T[..., 2, 1] = t23, np.conj(t23)
    return T


def coherency_to_entries(T):
    """Inverse of :func:`coherency_from_entries` (reads the upper triangle)."""
    T = np.asarray(T)
    return np.stack(
        [
            T[..., 0, 0].real, T[..., 1, 1].real, T[..., 2, 2].real,
            T[..., 0, 1].real, T[..., 0, 1].imag,
            T[..., 0, 2].real, T[..., 0, 2].imag,
            T[..., 1, 2].real, T[..., 1, 2].imag,
        ],
        axis=-1,
    )


def _check_coherency(T):
    T = np.asarray(T, dtype=complex)
    if T.shape[-2:] != (3, 3):
        raise ValueError(f"expected (..., 3, 3) coherency matrices, got {T.shape}")
    if not np.all(np.isfinite(T)):
        raise NonFiniteInput("coherency matrix contains NaN or Inf")
    return T


def _jacobi_rotate(A, V, p, q, active):
    """One complex Jacobi rotation zeroing ``A[..., p, q]`` where ``active``."""
    app = A[..., p, p].real
    aqq = A[..., q, q].real
    z = A[..., p, q]
    r = np.abs(z)
    nz = active & (r > 0.0)
    if not np.any(nz):
        return
    safe_r = np.where(nz, r, 1.0)
    phase = np.where(nz, z / safe_r, 1.0)
    theta = (aqq - app) / (2.0 * safe_r)
    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    t = np.where(nz, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    cph = np.conj(phase)

    # columns: A <- A U, with U = [[c, s], [-s*conj(e), c*conj(e)]] on (p, q)
    col_p = A[..., :, p].copy()
    col_q = A[..., :, q].copy()
    A[..., :, p] = np.where(nz[..., None], c[..., None] * col_p - (s * cph)[..., None] * col_q, col_p)
    A[..., :, q] = np.where(nz[..., None], s[..., None] * col_p + (c * cph)[..., None] * col_q, col_q)
    # rows: A <- U^H A
    row_p = A[..., p, :].copy()
    row_q = A[..., q, :].copy()
    A[..., p, :] = np.where(nz[..., None], c[..., None] * row_p - (s * phase)[..., None] * row_q, row_p)
    A[..., q, :] = np.where(nz[..., None], s[..., None] * row_p + (c * phase)[..., None] * row_q, row_q)
    A[..., p, q] = np.where(nz, 0.0, A[..., p, q])
    A[..., q, p] = np.where(nz, 0.0, A[..., q, p])
    A[..., p, p] = A[..., p, p].real
    A[..., q, q] = A[..., q, q].real

    vp = V[..., :, p].copy()
    vq = V[..., :, q].copy()
    V[..., :, p] = np.where(nz[..., None], c[..., None] * vp - (s * cph)[..., None] * vq, vp)
    V[..., :, q] = np.where(nz[..., None], s[..., None] * vp + (c * cph)[..., None] * vq, vq)


def eig3_hermitian(T):
    """Eigendecomposition of 3x3 Hermitian PSD matrices.

    Parameters
    ----------
    T : array_like, shape (..., 3, 3)
        Hermitian coherency matrices. Only the upper triangle and the real
        part of the diagonal are read.

    Returns
    -------
    EigenSystem
        Eigenvalues sorted descending, eigenvectors as columns. Values below
        ``64 * eps * trace`` (rounding noise, or negatives within the PSD
        slack) are set to exactly 0.

    Raises
    ------
    NonFiniteInput
        If any entry is NaN or infinite.
    NotPSD
        If an eigenvalue is below ``-1e-9 * trace``.
    """
    T = _check_coherency(T)
    batch = T.shape[:-2]
    A = coherency_from_entries(coherency_to_entries(T)).reshape(-1, 3, 3)
    V = np.broadcast_to(np.eye(3, dtype=complex), A.shape).copy()

    fro2 = np.sum(np.abs(A) ** 2, axis=(-2, -1))
    active = np.ones(A.shape[0], dtype=bool)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off2 = 2.0 * (np.abs(A[:, 0, 1]) ** 2 + np.abs(A[:, 0, 2]) ** 2 + np.abs(A[:, 1, 2]) ** 2)
        active &= off2 > (_JACOBI_TOL ** 2) * fro2
        if not np.any(active):
            break
        for p, q in _JACOBI_PAIRS:
            _jacobi_rotate(A, V, p, q, active)

    w = np.real(np.diagonal(A, axis1=-2, axis2=-1))
    trace = np.real(np.trace(T.reshape(-1, 3, 3), axis1=-2, axis2=-1))
    slack = PSD_SLACK * np.abs(trace)
    if np.any(w < -slack[:, None]):
        raise NotPSD(f"eigenvalue {w.min():.3e} below the PSD slack")
    # anything below rounding level of the trace is a zero eigenvalue; this
    # keeps anisotropy defined (0) for rank-deficient input
    w = np.where(w > ROUNDOFF_FLOOR * np.abs(trace)[:, None], w, 0.0)

    # stable descending order keeps the Jacobi column order on exact ties
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    V = np.take_along_axis(V, order[:, None, :], axis=-1)
    return EigenSystem(w.reshape(batch + (3,)), V.reshape(batch + (3, 3)))


def cloude_pottier(es):
    """Entropy, mean alpha angle and anisotropy of an eigensystem.

    Entropy uses log base 3 so that it lies in ``[0, 1]``; ``0 log 0`` is
    taken as 0. Anisotropy is defined as 0 when ``lambda2 + lambda3 == 0``.

    Returns
    -------
    H, alpha, A : ndarray
        Arrays with the batch shape of ``es``; alpha is in radians.
    """
    lam = np.asarray(es.eigenvalues, dtype=float)
    vec = np.asarray(es.eigenvectors)
    span = lam.sum(axis=-1)
    if np.any(~(span > 0.0)):
        raise DegenerateSpan("eigenvalue sum must be positive")
    p = lam / span[..., None]
    plogp = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    H = -plogp.sum(axis=-1) / np.log(3.0)
    H = np.clip(H, 0.0, 1.0) + 0.0

    first = np.clip(np.abs(vec[..., 0, :]), 0.0, 1.0)
    alphas = np.arccos(first)
    alpha = np.clip((p * alphas).sum(axis=-1), 0.0, np.pi / 2)

    den = lam[..., 1] + lam[..., 2]
    A = np.where(den > 0.0, (lam[..., 1] - lam[..., 2]) / np.where(den > 0.0, den, 1.0), 0.0)
    return H, alpha, np.clip(A, 0.0, 1.0)


def feature_vector(T):
    """Seven features ``[l1, l2, l3, span, H, alpha, A]`` per matrix.

    ``T`` may be a single matrix or a stack with shape ``(..., 3, 3)``.
    """
    es = eig3_hermitian(T)
    H, alpha, A = cloude_pottier(es)
    lam = es.eigenvalues
    span = lam.sum(axis=-1)
    return np.concatenate(
        [lam, span[..., None], H[..., None], alpha[..., None], A[..., None]], axis=-1
    )


@dataclass(frozen=True)
class FeatureStats:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, X):
        """Scale new samples with the stored statistics."""
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.mean.shape[0]:
            raise DimensionMismatch(f"expected {self.mean.shape[0]} features, got {X.shape[-1]}")
        keep = self.std >= 1e-12
        out = np.zeros_like(X)
        out[..., keep] = (X[..., keep] - self.mean[keep]) / self.std[keep]
        return out


def normalize_features(samples):
    """Z-score each feature column.

    Parameters
    ----------
    samples : array_like, shape (n, d)
        Training-split feature vectors, ``n >= 2``.

    Returns
    -------
    scaled : ndarray, shape (n, d)
    stats : FeatureStats
        Column means and population standard deviations; columns whose
        deviation is below ``1e-12`` map to 0. Reuse ``stats.apply`` on test
        pixels.
    """
    X = np.asarray(samples, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise EmptyInput("normalize_features needs at least two samples")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    stats = FeatureStats(mean, std)
    return stats.apply(X), stats
