# From raw encoder embeddings to a contrastive-similarity affinity matrix:
# normalize, take Hadamard pair features, fit an uncentered PCA, project.

import numpy as np

from spectral_uq import fit_pca, hadamard_features, normalize_embeddings, project_affinity

rng = np.random.default_rng(7)

# six "responses": two tight groups of three, in a 12-dim embedding space
anchor_a, anchor_b = rng.standard_normal((2, 12))
E = np.vstack(
    [anchor_a + 0.1 * rng.standard_normal(12) for _ in range(3)]
    + [anchor_b + 0.1 * rng.standard_normal(12) for _ in range(3)]
)

E = normalize_embeddings(E)
pairs = hadamard_features(E)
print("pair feature rows (m(m+1)/2):", pairs.features.shape)

# the component sum of a pair feature IS the cosine of its two embeddings
print("sum(f_01) =", pairs.pair_feature(0, 1).sum())
print("cos(e0,e1) =", float(E[0] @ E[1]))

# full-rank PCA keeps that identity, so the affinity is clamped cosine
model_full = fit_pca(pairs.features, k=12)
W_full = project_affinity(pairs, model_full).W
print("\nfull-rank affinity (clamped cosine):")
print(np.round(W_full, 3))

# a reduced basis (the usual operating point) perturbs it only slightly
model_small = fit_pca(pairs.features, k=4)
W_small = project_affinity(pairs, model_small).W
print("\nrank-4 affinity:")
print(np.round(W_small, 3))
print("max |difference|:", np.abs(W_full - W_small).max())

# the alternative scalarization: cosine against the mean self-pair feature
W_proto = project_affinity(pairs, model_small, strategy="prototype-cosine").W
print("\nprototype-cosine affinity:")
print(np.round(W_proto, 3))
