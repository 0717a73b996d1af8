import numpy as np
import pytest

from oracles import cubic_eigenvalues, entropy_base3, random_psd
from splnc.errors import DegenerateSpan, EmptyInput, NonFiniteInput, NotPSD
from splnc.features import (
    EigenSystem,
    FeatureStats,
    cloude_pottier,
    coherency_from_entries,
    coherency_to_entries,
    eig3_hermitian,
    feature_vector,
    normalize_features,
)


def _reconstruct(es):
    V = es.eigenvectors
    return np.einsum("...ik,...k,...jk->...ij", V, es.eigenvalues, V.conj())


def test_entries_round_trip():
    rng = np.random.default_rng(0)
    e = rng.normal(size=(5, 9))
    T = coherency_from_entries(e)
    assert np.allclose(T, np.conj(np.swapaxes(T, -1, -2)))
    assert np.array_equal(coherency_to_entries(T), e)
    with pytest.raises(ValueError):
        coherency_from_entries(np.zeros(8))


def test_identity_and_diagonal():
    es = eig3_hermitian(np.eye(3))
    assert np.allclose(es.eigenvalues, 1.0)
    es = eig3_hermitian(np.diag([3.0, 2.0, 1.0]).astype(complex))
    assert np.array_equal(es.eigenvalues, [3.0, 2.0, 1.0])
    assert np.allclose(np.abs(es.eigenvectors), np.eye(3))


def test_unsorted_diagonal_is_sorted():
    es = eig3_hermitian(np.diag([1.0, 5.0, 3.0]))
    assert np.array_equal(es.eigenvalues, [5.0, 3.0, 1.0])
    assert np.allclose(np.abs(es.eigenvectors[:, 0]), [0, 1, 0])


def test_eigenvalues_match_cubic_oracle():
    rng = np.random.default_rng(1)
    T = random_psd(rng, 100)
    es = eig3_hermitian(T)
    for k in range(100):
        assert np.max(np.abs(es.eigenvalues[k] - cubic_eigenvalues(T[k]))) < 1e-8


def test_reconstruction_and_unit_vectors():
    rng = np.random.default_rng(2)
    T = np.concatenate([random_psd(rng, 500), random_psd(rng, 250, rank=1), random_psd(rng, 250, rank=2)])
    es = eig3_hermitian(T)
    err = np.linalg.norm(_reconstruct(es) - T, axis=(-2, -1)) / np.linalg.norm(T, axis=(-2, -1))
    assert err.max() <= 1e-8
    assert np.allclose(np.linalg.norm(es.eigenvectors, axis=-2), 1.0, atol=1e-10)
    assert np.all(np.diff(es.eigenvalues, axis=-1) <= 0)
    assert np.all(es.eigenvalues >= 0)


def test_batch_equals_single_bitwise():
    rng = np.random.default_rng(3)
    T = random_psd(rng, 20)
    es = eig3_hermitian(T)
    for k in (0, 7, 19):
        one = eig3_hermitian(T[k])
        assert np.array_equal(one.eigenvalues, es.eigenvalues[k])
        assert np.array_equal(one.eigenvectors, es.eigenvectors[k])


def test_repeated_runs_bit_identical_on_degenerate_spectrum():
    T = np.eye(3) + 0.0j
    a, b = eig3_hermitian(T), eig3_hermitian(T.copy())
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_errors():
    T = np.eye(3, dtype=complex)
    T[0, 1] = np.nan
    with pytest.raises(NonFiniteInput):
        eig3_hermitian(T)
    with pytest.raises(NotPSD):
        eig3_hermitian(np.diag([1.0, 1.0, -0.1]))
    # within the slack: clamped to zero
    es = eig3_hermitian(np.diag([1.0, 1.0, -1e-12]))
    assert es.eigenvalues[2] == 0.0


def test_cloude_pottier_examples():
    H, alpha, A = cloude_pottier(eig3_hermitian(np.eye(3)))
    assert abs(H - 1.0) < 1e-12 and A == 0.0
    H, alpha, A = cloude_pottier(eig3_hermitian(np.diag([1.0, 0.0, 0.0])))
    assert H == 0.0 and alpha == 0.0 and A == 0.0

    lam = np.array([0.5, 0.3, 0.2])
    es = EigenSystem(lam, np.eye(3, dtype=complex))
    H, alpha, A = cloude_pottier(es)
    assert abs(H - entropy_base3(lam)) < 1e-14
    assert abs(A - 0.2) < 1e-15
    # standard basis: alpha_k = arccos(|e_k[0]|) = (0, pi/2, pi/2)
    assert abs(alpha - (0.3 + 0.2) * np.pi / 2) < 1e-14

    with pytest.raises(DegenerateSpan):
        cloude_pottier(EigenSystem(np.zeros(3), np.eye(3)))


def test_cloude_pottier_ranges_and_scale_invariance():
    rng = np.random.default_rng(4)
    T = np.concatenate([random_psd(rng, 300), random_psd(rng, 100, rank=1)])
    H, alpha, A = cloude_pottier(eig3_hermitian(T))
    assert np.all((H >= 0) & (H <= 1))
    assert np.all((A >= 0) & (A <= 1))
    assert np.all((alpha >= 0) & (alpha <= np.pi / 2))
    H2, alpha2, A2 = cloude_pottier(eig3_hermitian(7.3 * T))
    assert np.max(np.abs(H - H2)) < 1e-12
    assert np.max(np.abs(alpha - alpha2)) < 1e-12
    assert np.max(np.abs(A - A2)) < 1e-12


def test_feature_vector():
    f = feature_vector(np.eye(3))
    assert np.allclose(f[[0, 1, 2, 3, 4, 6]], [1, 1, 1, 3, 1, 0])
    assert np.array_equal(feature_vector(np.diag([1.0, 0.0, 0.0])), [1, 0, 0, 1, 0, 0, 0])

    rng = np.random.default_rng(5)
    T = random_psd(rng, 10)
    F = feature_vector(T)
    es = eig3_hermitian(T)
    H, alpha, A = cloude_pottier(es)
    assert np.array_equal(F[:, :3], es.eigenvalues)
    assert np.array_equal(F[:, 3], es.eigenvalues.sum(axis=1))
    assert np.array_equal(F[:, 4:], np.stack([H, alpha, A], axis=1))
    for k in range(10):
        lam = cubic_eigenvalues(T[k])
        assert abs(F[k, 4] - entropy_base3(lam)) < 1e-8
        assert abs(F[k, 6] - (lam[1] - lam[2]) / (lam[1] + lam[2])) < 1e-8


def test_normalize_features():
    X = np.array([np.zeros(7), 2 * np.ones(7)])
    Z, stats = normalize_features(X)
    assert np.array_equal(Z, [-np.ones(7), np.ones(7)])

    rng = np.random.default_rng(6)
    X = rng.normal(3.0, 5.0, size=(200, 7))
    X[:, 2] = 4.0
    Z, stats = normalize_features(X)
    assert np.all(Z[:, 2] == 0)
    keep = [0, 1, 3, 4, 5, 6]
    assert np.max(np.abs(Z[:, keep].mean(axis=0))) < 1e-10
    assert np.max(np.abs(Z[:, keep].var(axis=0) - 1)) < 1e-10
    assert np.array_equal(stats.apply(X), Z)

    with pytest.raises(EmptyInput):
        normalize_features(np.zeros((1, 7)))


def test_feature_stats_dimension_check():
    stats = FeatureStats(np.zeros(7), np.ones(7))
    with pytest.raises(ValueError):
        stats.apply(np.zeros((2, 6)))
