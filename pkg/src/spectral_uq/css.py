"""Contrastive semantic similarity features and their affinity projection.

Pipeline: L2-normalize per-response encoder embeddings, form elementwise
(Hadamard) product features for every response pair, reduce them with an
uncentered PCA fit over the whole corpus, and project each pair feature to
a scalar similarity in [0, 1].

The pair feature of two unit vectors sums componentwise to their cosine;
uncentered PCA preserves that identity on the principal subspace, so with
k = d the "unit-sum" projection reproduces clamped cosine similarity
exactly.  How to collapse a reduced pair feature to one scalar is the one
genuinely open design point here, so two strategies are provided:

* ``unit-sum`` (default): component sum of the rank-k reconstruction of
  the pair feature;
* ``prototype-cosine``: cosine between the reduced pair feature and the
  mean reduced self-pair (diagonal) feature.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .affinity import AffinityMatrix

PCA_MAGIC = b"CSSP"
STRATEGIES = ("unit-sum", "prototype-cosine")


def normalize_embeddings(E):
    """Scale each row to unit L2 norm; reject near-zero rows by index."""
    E = np.asarray(E, dtype=np.float64)
    norms = np.linalg.norm(E, axis=1)
    bad = np.nonzero(norms <= 1e-12)[0]
    if bad.size:
        raise ValueError(f"embedding row {bad[0]} has zero norm")
    return E / norms[:, None]


@dataclass(eq=False)
class PairFeatureSet:
    """Hadamard-product features for all canonical pairs i <= j of one bundle.

    Row order is the upper triangle by rows: (0,0), (0,1), ..., (1,1), ...
    The diagonal self-pairs are included.
    """

    features: np.ndarray  # (m*(m+1)/2, d)
    m: int

    def index(self, i, j):
        """Row index of the canonical pair (min(i,j), max(i,j))."""
        i, j = (i, j) if i <= j else (j, i)
        return i * self.m - (i * (i - 1)) // 2 + (j - i)

    def pair_feature(self, i, j):
        return self.features[self.index(i, j)]

    @property
    def dim(self):
        return self.features.shape[1]


def hadamard_features(E_norm):
    """Elementwise-product pair features from unit-normalized embeddings."""
    E_norm = np.asarray(E_norm, dtype=np.float64)
    norms = np.linalg.norm(E_norm, axis=1)
    if not np.allclose(norms, 1.0, atol=1e-6):
        raise ValueError("embeddings must be unit-normalized (within 1e-6)")
    m = E_norm.shape[0]
    ii, jj = np.triu_indices(m)
    return PairFeatureSet(features=E_norm[ii] * E_norm[jj], m=m)


@dataclass(eq=False)
class PcaModel:
    """Top-k right singular vectors of an uncentered feature matrix.

    ``basis`` is d x k with orthonormal columns; ``singular_values`` are the
    k leading singular values, descending.  ``n_fit`` records the fit
    population (not persisted in the binary format).
    """

    basis: np.ndarray
    singular_values: np.ndarray
    n_fit: int | None = None

    @property
    def d(self):
        return self.basis.shape[0]

    @property
    def k(self):
        return self.basis.shape[1]


def fit_pca(features, k):
    """Fit an uncentered PCA (plain SVD) on a stack of d-vectors.

    Deterministic given input order; each basis column's sign is fixed so
    its largest-magnitude component is positive.  Centering is deliberately
    skipped: it would break the component-sum/cosine identity that makes
    the full-rank affinity exact.
    """
    F = np.asarray(features, dtype=np.float64)
    if F.ndim != 2:
        raise ValueError(f"need a 2-D feature stack, got ndim={F.ndim}")
    n, d = F.shape
    if n < 1:
        raise ValueError("need at least one feature vector")
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d={d}, got k={k}")
    _, s, Vt = np.linalg.svd(F, full_matrices=True)
    basis = Vt[:k].T.copy()
    sv = np.zeros(k)
    sv[: min(k, s.size)] = s[: min(k, s.size)]
    for c in range(k):
        j = int(np.argmax(np.abs(basis[:, c])))
        if basis[j, c] < 0:
            basis[:, c] = -basis[:, c]
    return PcaModel(basis=basis, singular_values=sv, n_fit=n)


def explained_variance_fractions(model):
    """Fraction of total captured variance per kept component."""
    sq = model.singular_values**2
    total = sq.sum()
    return sq / total if total > 0 else sq


def project_affinity(pairs, model, strategy="unit-sum"):
    """Collapse pair features to a symmetric affinity matrix in [0, 1].

    Both strategies clamp to [0, 1] (anti-similar pairs count as fully
    dissimilar) and force the diagonal to exactly 1.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if pairs.dim != model.d:
        raise ValueError(
            f"feature dimension {pairs.dim} does not match PCA model d={model.d}"
        )
    Z = pairs.features @ model.basis  # reduced pair features, one row per pair
    if strategy == "unit-sum":
        scores = Z @ model.basis.sum(axis=0)
    else:
        diag_rows = np.array([pairs.index(i, i) for i in range(pairs.m)])
        prototype = Z[diag_rows].mean(axis=0)
        p_norm = np.linalg.norm(prototype)
        z_norms = np.linalg.norm(Z, axis=1)
        denom = z_norms * p_norm
        with np.errstate(invalid="ignore", divide="ignore"):
            scores = np.where(denom > 1e-300, (Z @ prototype) / denom, 0.0)
    scores = np.clip(scores, 0.0, 1.0)

    m = pairs.m
    W = np.empty((m, m))
    ii, jj = np.triu_indices(m)
    W[ii, jj] = scores
    W[jj, ii] = scores
    np.fill_diagonal(W, 1.0)
    return AffinityMatrix(W=W, method="css")


def save_pca(model, path):
    """Persist a PcaModel: magic, u32 d, u32 k, d*k f64 basis, k f64 values."""
    payload = (
        PCA_MAGIC
        + struct.pack("<II", model.d, model.k)
        + model.basis.astype("<f8").tobytes()
        + model.singular_values.astype("<f8").tobytes()
    )
    Path(path).write_bytes(payload)


def load_pca(path):
    blob = Path(path).read_bytes()
    if blob[:4] != PCA_MAGIC:
        raise ValueError(f"{path}: bad PCA model magic {blob[:4]!r}")
    d, k = struct.unpack("<II", blob[4:12])
    need = 12 + d * k * 8 + k * 8
    if len(blob) < need:
        raise ValueError(f"{path}: truncated PCA model file")
    basis = np.frombuffer(blob[12 : 12 + d * k * 8], dtype="<f8").reshape(d, k).copy()
    sv = np.frombuffer(blob[12 + d * k * 8 : need], dtype="<f8").copy()
    return PcaModel(basis=basis, singular_values=sv, n_fit=None)
