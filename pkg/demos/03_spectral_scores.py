# The three graph-Laplacian uncertainty scores on affinities with a known
# number of planted semantic clusters.  The eigenvalue score acts as a soft
# cluster count, the degree score as mean disagreement, and eccentricity as
# spread of the spectral embedding.

import numpy as np

from spectral_uq import spectral_scores

def planted_affinity(sizes, within=0.95, across=0.05):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    W = np.where(labels[:, None] == labels[None, :], within, across)
    np.fill_diagonal(W, 1.0)
    return W

print(f"{'clusters':>10} {'u_eig':>8} {'u_deg':>8} {'u_ecc':>8}   eigenvalues")
for sizes in [(9,), (5, 4), (3, 3, 3)]:
    res = spectral_scores(planted_affinity(sizes))
    head = np.round(res.eigenvalues[:4], 3)
    print(f"{len(sizes):>10} {res.u_eig:>8.3f} {res.u_deg:>8.3f} {res.u_ecc:>8.3f}   {head}...")

# perfect consensus: every score bottoms out
res = spectral_scores(np.ones((9, 9)))
print(f"{'consensus':>10} {res.u_eig:>8.3f} {res.u_deg:>8.3f} {res.u_ecc:>8.3f}")

# total disagreement: the identity affinity
res = spectral_scores(np.eye(9))
print(f"{'disjoint':>10} {res.u_eig:>8.3f} {res.u_deg:>8.3f} {res.u_ecc:>8.3f}")
