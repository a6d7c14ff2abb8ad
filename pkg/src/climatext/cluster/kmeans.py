"""KMeans: Lloyd's algorithm with k-means++ seeding and restarts."""

from __future__ import annotations

import numpy as np

from . import kernels
from .features import FeatureMatrix
from .model import ClusterModel

MAX_ITER = 300


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++: D^2-weighted sampling of initial centroids."""
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[rng.integers(n)]
    for j in range(1, k):
        d2 = kernels.min_sqdist(X, centroids[:j])
        total = d2.sum()
        if total <= 0.0:  # all points coincide with chosen centroids
            centroids[j] = X[rng.integers(n)]
            continue
        r = rng.random() * total
        centroids[j] = X[np.searchsorted(np.cumsum(d2), r)]
    return centroids


def _lloyd(X: np.ndarray, init: np.ndarray,
           max_iter: int = MAX_ITER) -> tuple[np.ndarray, np.ndarray, float, int, int]:
    """Iterate assignment/update to a fixed point.

    Returns (labels, centroids, inertia, iterations, empty_repairs).
    """
    centroids = init.copy()
    k = centroids.shape[0]
    labels = np.full(X.shape[0], -1, dtype=np.int64)
    repairs = 0
    it = 0
    for it in range(1, max_iter + 1):
        new_labels, _ = kernels.assign_labels(X, centroids)
        sums, counts = kernels.update_centroids(X, new_labels, k)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            # reseed each empty cluster at the point farthest from its
            # current centroid (classic repair, recorded in metadata)
            d2 = kernels.min_sqdist(X, centroids[counts > 0])
            order = np.argsort(d2)[::-1]
            for slot, j in enumerate(empty):
                far = order[slot % len(order)]
                sums[j] = X[far]
                counts[j] = 1
                new_labels[far] = j
            repairs += int(empty.size)
            sums, counts = kernels.update_centroids(X, new_labels, k)
            counts = np.maximum(counts, 1)
        centroids = sums / counts[:, None]
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    final_labels, inertia = kernels.assign_labels(X, centroids)
    return final_labels, centroids, inertia, it, repairs


def kmeans_fit(features: FeatureMatrix, k: int, seed: int = 0,
               n_restarts: int = 10,
               extra_inits: list[np.ndarray] | None = None) -> ClusterModel:
    """Best-of-restarts KMeans on the standardized features.

    Deterministic given (data, k, seed, n_restarts): restart r uses the
    rng stream seeded by [seed, r], and ties on inertia resolve to the
    lower restart index.
    """
    X = features.std_values
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    best = None
    inits = [("kmeans++", r) for r in range(n_restarts)]
    for r, extra in enumerate(extra_inits or []):
        inits.append(("warm", r))
    for kind, r in inits:
        if kind == "kmeans++":
            rng = np.random.default_rng([seed, r])
            init = _kmeanspp_init(X, k, rng)
        else:
            init = np.asarray((extra_inits or [])[r], dtype=np.float64)
            if init.shape != (k, X.shape[1]):
                raise ValueError("warm-start init has wrong shape")
        labels, centroids, inertia, iters, repairs = _lloyd(X, init)
        if best is None or inertia < best[0] - 1e-12:
            best = (inertia, labels, centroids, iters, repairs, kind, r)
    inertia, labels, centroids, iters, repairs, kind, r = best
    return ClusterModel(
        method="kmeans", k=k, assignments=labels,
        centroids_std=centroids,
        centroids_original=features.inverse_transform(centroids),
        seed=seed, n_restarts=n_restarts, inertia=float(inertia),
        metadata={"iterations": iters, "empty_cluster_repairs": repairs,
                  "winning_restart": {"kind": kind, "index": r},
                  "kernel_backend": kernels.BACKEND})


def elbow_scan(features: FeatureMatrix, k_range, seed: int = 0,
               n_restarts: int = 10) -> dict[int, float]:
    """Inertia per k over ``k_range`` (best of restarts).

    Each k additionally warm-starts from the previous best solution's
    centroids plus the farthest point, which makes inertia non-increasing
    in k deterministically.
    """
    ks = sorted(set(int(k) for k in k_range))
    n = features.n_rows
    if ks and not (1 <= ks[0] and ks[-1] <= n):
        raise ValueError(f"k_range must lie within [1, {n}]")
    X = features.std_values
    out: dict[int, float] = {}
    prev_model = None
    for k in ks:
        extra = []
        if prev_model is not None and prev_model.k == k - 1:
            d2 = kernels.min_sqdist(X, prev_model.centroids_std)
            far = X[int(np.argmax(d2))]
            extra.append(np.vstack([prev_model.centroids_std, far[None, :]]))
        model = kmeans_fit(features, k, seed=seed, n_restarts=n_restarts,
                           extra_inits=extra)
        out[k] = float(model.inertia)
        prev_model = model
    return out


def elbow_knee(inertias: dict[int, float]) -> int | None:
    """k with the largest second difference (needs 3+ consecutive points)."""
    ks = sorted(inertias)
    if len(ks) < 3:
        return None
    best_k, best_gain = None, -np.inf
    for a, b, c in zip(ks, ks[1:], ks[2:]):
        if b - a == c - b == ks[1] - ks[0]:  # uniform spacing only
            gain = inertias[a] - 2 * inertias[b] + inertias[c]
            if gain > best_gain:
                best_gain, best_k = gain, b
    return best_k
