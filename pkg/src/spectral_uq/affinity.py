"""Shared affinity-matrix type: pairwise semantic similarities in [0, 1]."""

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class AffinityMatrix:
    """Symmetric m x m similarity matrix with unit diagonal.

    ``method`` tags the construction route ("css" or "nli").
    """

    W: np.ndarray
    method: str = "css"

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        m = self.W.shape[0]
        if self.W.ndim != 2 or self.W.shape != (m, m):
            raise ValueError(f"affinity matrix must be square, got {self.W.shape}")
        if not np.allclose(self.W, self.W.T, atol=1e-10):
            raise ValueError("affinity matrix must be symmetric")
        if (self.W < -1e-12).any() or (self.W > 1 + 1e-12).any():
            raise ValueError("affinity entries must lie in [0, 1]")
        if not np.allclose(np.diag(self.W), 1.0, atol=1e-12):
            raise ValueError("affinity diagonal must be exactly 1")

    @property
    def m(self):
        return self.W.shape[0]


def as_affinity(w, method="css"):
    """Coerce a raw array (or pass through an AffinityMatrix) with checks."""
    if isinstance(w, AffinityMatrix):
        return w
    return AffinityMatrix(W=w, method=method)
