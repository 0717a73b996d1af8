"""
Polarimetric features of simulated coherency matrices
=====================================================

Draw a few multilook coherency matrices per class prototype and look at the
eigenvalues and the entropy / mean alpha / anisotropy triple that make up
the 7-dimensional feature vector.
"""

from splnc.features import cloude_pottier, eig3_hermitian, feature_vector
from splnc.scene import builtin_class_sigmas, make_rng, sample_wishart_coherency

rng = make_rng(0)
protos = builtin_class_sigmas(5, similarity=0.6)

# %%
# Per class: mean feature vector over 2000 four-look pixels
names = ["l1", "l2", "l3", "span", "H", "alpha", "A"]
print("class " + " ".join(f"{n:>7}" for n in names))
for k, sigma in enumerate(protos, start=1):
    T = sample_wishart_coherency(sigma, 4, rng, size=2000)
    F = feature_vector(T)
    print(f"{k:>5} " + " ".join(f"{v:7.3f}" for v in F.mean(axis=0)))

# %%
# Fewer looks means noisier matrices and a wider spread of entropy
sigma = protos[0]
for looks in (1, 2, 4, 16):
    T = sample_wishart_coherency(sigma, looks, rng, size=2000)
    H = cloude_pottier(eig3_hermitian(T))[0]
    print(f"looks {looks:>2}: H mean {H.mean():.3f} std {H.std():.3f}")
