"""Graph-Laplacian uncertainty scores over an affinity matrix.

Three scalar measures of semantic dispersion among m sampled responses:

* degree score: average disagreement, trace(m - D) / m^2 where D_ii is the
  row sum of W;
* eigenvalue score: sum of max(0, 1 - lambda_k) over the spectrum of the
  symmetric normalized Laplacian, a soft count of semantic clusters;
* eccentricity: dispersion of the spectral-embedding coordinates around
  their centroid, using the ceil(eigenvalue score) lowest eigenvectors.

All three increase with semantic diversity of the response set.
"""

import math
from dataclasses import dataclass

import numpy as np

from .affinity import as_affinity
from .jacobi import jacobi_eigh

_NEG_EIG_CLAMP = 1e-10


@dataclass(eq=False)
class SpectralResult:
    """Eigendecomposition of the graph Laplacian plus the three scores.

    ``eigenvalues`` ascend; ``eigenvectors`` holds the aligned orthonormal
    eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    u_deg: float
    u_eig: float
    u_ecc: float
    method: str


def degree_uncertainty(w):
    """trace(m - D) / m^2; 0 at perfect consensus, (m-1)/m at none."""
    W = as_affinity(w).W
    m = W.shape[0]
    degrees = W.sum(axis=1)
    return float((m - degrees).sum() / (m * m))


def laplacian_spectrum(w, normalized=True, label=None):
    """Eigendecomposition of the graph Laplacian of an affinity matrix.

    The default is the symmetric normalized form
    L = I - D^(-1/2) W D^(-1/2), whose spectrum lies in [0, 2] so the
    "ignore eigenvalues above 1" rule carries cluster-counting meaning;
    ``normalized=False`` gives the plain L = D - W for comparison.

    Returns (eigenvalues ascending, eigenvectors as columns).  Tiny negative
    eigenvalues (within 1e-10 of zero) are clamped to 0.  ``label`` names the
    bundle in the non-convergence error, if the solver ever hits its cap.
    """
    W = as_affinity(w).W
    m = W.shape[0]
    degrees = W.sum(axis=1)  # >= 1 since diag(W) = 1
    if normalized:
        inv_sqrt = 1.0 / np.sqrt(degrees)
        L = np.eye(m) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    else:
        L = np.diag(degrees) - W
    L = (L + L.T) / 2.0
    eigvals, eigvecs = jacobi_eigh(L, label=label)
    eigvals[(eigvals < 0) & (eigvals >= -_NEG_EIG_CLAMP)] = 0.0
    return eigvals, eigvecs


def eig_uncertainty(eigenvalues):
    """Sum of max(0, 1 - lambda_k): a soft semantic-cluster count.

    For exact 0/1 block-diagonal affinities this equals the number of
    connected components; it is always >= 1 because lambda_1 = 0.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    return float(np.maximum(0.0, 1.0 - eigenvalues).sum())


def ecc_uncertainty(eigenvalues, eigenvectors):
    """Dispersion of spectral coordinates around their centroid.

    Each response i gets coordinates from the k lowest eigenvectors, with
    k = ceil(eig_uncertainty) clamped to [1, m]; the result is the L2 norm
    of all centroid offsets concatenated.  Consensus (one cluster with a
    constant lowest eigenvector) gives exactly 0.
    """
    eigenvectors = np.asarray(eigenvectors, dtype=np.float64)
    m = eigenvectors.shape[0]
    # the 1e-9 guard keeps eigensolver noise from bumping k past an
    # integer-valued soft cluster count
    k = min(max(int(math.ceil(eig_uncertainty(eigenvalues) - 1e-9)), 1), m)
    coords = eigenvectors[:, :k]
    centered = coords - coords.mean(axis=0)
    return float(np.linalg.norm(centered))


def spectral_scores(w, normalized=True, label=None):
    """All three Laplacian scores plus the spectrum, as a SpectralResult."""
    aff = as_affinity(w)
    eigvals, eigvecs = laplacian_spectrum(aff, normalized=normalized, label=label)
    return SpectralResult(
        eigenvalues=eigvals,
        eigenvectors=eigvecs,
        u_deg=degree_uncertainty(aff),
        u_eig=eig_uncertainty(eigvals),
        u_ecc=ecc_uncertainty(eigvals, eigvecs),
        method=aff.method,
    )
