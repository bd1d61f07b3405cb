"""Dense symmetric eigensolver via cyclic Jacobi rotations.

Adequate for the small matrices this library sees (m up to a few hundred);
dependency-free and deterministic, which keeps pipeline output bit-stable.
"""

import numpy as np


class EigenConvergenceError(RuntimeError):
    """Raised when the sweep cap is hit before the off-diagonal norm vanishes."""


def _off_norm_sq(A):
    # sum only off-diagonal squares; subtracting diag^2 from the total
    # would cancel catastrophically once the off-diagonal is near zero
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return float((off * off).sum())


def jacobi_eigh(A, tol=1e-12, max_sweeps=100, label=None):
    """Full eigendecomposition of a symmetric matrix.

    Runs cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops
    below ``tol`` (relative to the input norm, floored at 1), or raises
    EigenConvergenceError after ``max_sweeps``.

    Returns (eigenvalues ascending, eigenvectors as columns).  Eigenvector
    signs are fixed so each column's largest-magnitude component is
    positive, making the output deterministic.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"need a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, atol=1e-10):
        raise ValueError("matrix is not symmetric")
    n = A.shape[0]
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V

    scale = max(1.0, float(np.linalg.norm(A)))
    threshold_sq = (tol * scale) ** 2
    converged = _off_norm_sq(A) <= threshold_sq
    for _ in range(max_sweeps):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e100:  # theta^2 would overflow; use the limit
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        converged = _off_norm_sq(A) <= threshold_sq
    if not converged:
        where = f" for bundle {label!r}" if label else ""
        raise EigenConvergenceError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps{where}"
        )

    eigvals = A.diagonal().copy()
    order = np.argsort(eigvals, kind="stable")
    eigvals = eigvals[order]
    V = V[:, order]
    for k in range(n):
        j = int(np.argmax(np.abs(V[:, k])))
        if V[j, k] < 0:
            V[:, k] = -V[:, k]
    return eigvals, V
