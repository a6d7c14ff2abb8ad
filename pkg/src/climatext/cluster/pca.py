"""PCA via eigendecomposition of the feature covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import FeatureMatrix


@dataclass(frozen=True)
class PcaResult:
    projected: np.ndarray          # (n, n_components)
    components: np.ndarray         # (n_components, d) row = unit loading vector
    explained_variance: np.ndarray
    explained_ratio: np.ndarray
    mean: np.ndarray


def pca_project(features: FeatureMatrix, n_components: int = 2) -> PcaResult:
    """Project standardized features onto top principal components.

    Components are ordered by descending eigenvalue; each component's
    sign is fixed so its largest-magnitude loading is positive.
    """
    Z = features.std_values
    d = Z.shape[1]
    if not 1 <= n_components <= d:
        raise ValueError(f"n_components must be in [1, {d}]")
    Zc = Z - Z.mean(axis=0)
    cov = (Zc.T @ Zc) / (Z.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    eigvecs = eigvecs[:, order]
    components = eigvecs.T[:n_components].copy()
    for i, vec in enumerate(components):
        j = int(np.argmax(np.abs(vec)))
        if vec[j] < 0:
            components[i] = -vec
    total = eigvals.sum()
    ratios = eigvals / total if total > 0 else np.zeros_like(eigvals)
    return PcaResult(
        projected=Zc @ components.T,
        components=components,
        explained_variance=eigvals[:n_components],
        explained_ratio=ratios[:n_components],
        mean=Z.mean(axis=0),
    )
