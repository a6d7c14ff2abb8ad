"""Pure-numpy kernel implementations (fallback for the compiled core).

Same contracts as _kernels.pyx; selected at import by .kernels when the
extension is unavailable or CLIMATEXT_PURE_PYTHON=1.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def assign_labels(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    """Nearest-centroid assignment. Returns (labels, inertia)."""
    # ||x-c||^2 = ||x||^2 - 2 x.c + ||c||^2, argmin over c
    x2 = np.einsum("ij,ij->i", X, X)
    c2 = np.einsum("ij,ij->i", centroids, centroids)
    cross = X @ centroids.T
    d2 = x2[:, None] - 2.0 * cross + c2[None, :]
    labels = np.argmin(d2, axis=1).astype(np.int64)
    # recompute the chosen distances directly: the expansion above can go
    # slightly negative from cancellation
    diff = X - centroids[labels]
    inertia = float(np.einsum("ij,ij->", diff, diff))
    return labels, inertia


def update_centroids(X: np.ndarray, labels: np.ndarray,
                     k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster coordinate sums and member counts."""
    d = X.shape[1]
    sums = np.zeros((k, d), dtype=np.float64)
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def min_sqdist(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Squared distance from each point to its nearest centroid."""
    x2 = np.einsum("ij,ij->i", X, X)
    c2 = np.einsum("ij,ij->i", centroids, centroids)
    d2 = x2[:, None] - 2.0 * (X @ centroids.T) + c2[None, :]
    return np.maximum(d2.min(axis=1), 0.0)


def gmm_estep_diag(X: np.ndarray, means: np.ndarray, variances: np.ndarray,
                   log_weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Diagonal-covariance E-step.

    Returns (responsibilities [n,k], total log-likelihood).
    """
    n, d = X.shape
    k = means.shape[0]
    log_prob = np.empty((n, k), dtype=np.float64)
    for j in range(k):
        diff = X - means[j]
        log_prob[:, j] = (-0.5 * (d * np.log(2.0 * np.pi)
                                  + np.log(variances[j]).sum()
                                  + ((diff * diff) / variances[j]).sum(axis=1))
                          + log_weights[j])
    m = log_prob.max(axis=1, keepdims=True)
    norm = m[:, 0] + np.log(np.exp(log_prob - m).sum(axis=1))
    resp = np.exp(log_prob - norm[:, None])
    return resp, float(norm.sum())
