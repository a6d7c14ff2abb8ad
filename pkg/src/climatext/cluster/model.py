"""Fitted cluster model container + deterministic JSON artifact."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import FeatureMatrix


@dataclass
class ClusterModel:
    method: str                   # "kmeans" | "gmm"
    k: int
    assignments: np.ndarray       # (n,) int cluster ids
    centroids_std: np.ndarray     # (k, d) in standardized space
    centroids_original: np.ndarray  # (k, d) back-transformed
    seed: int
    n_restarts: int
    inertia: float | None = None          # kmeans
    log_likelihood: float | None = None   # gmm
    bic: float | None = None              # gmm
    weights: np.ndarray | None = None     # gmm mixture weights
    responsibilities: np.ndarray | None = None  # gmm soft assignments
    metadata: dict = field(default_factory=dict)

    def cluster_counts(self) -> list[int]:
        return np.bincount(self.assignments, minlength=self.k).tolist()

    def to_json_dict(self, features: FeatureMatrix | None = None) -> dict:
        doc = {
            "method": self.method,
            "k": self.k,
            "seed": self.seed,
            "n_restarts": self.n_restarts,
            "inertia": self.inertia,
            "log_likelihood": self.log_likelihood,
            "bic": self.bic,
            "cluster_counts": self.cluster_counts(),
            "assignments": self.assignments.tolist(),
            "centroids_std": _round_trip_list(self.centroids_std),
            "centroids_original": _round_trip_list(self.centroids_original),
            "weights": _round_trip_list(self.weights) if self.weights is not None else None,
            "metadata": self.metadata,
        }
        if features is not None:
            doc["columns"] = list(features.columns)
            doc["firm_ids"] = list(features.firm_ids)
            doc["standardization"] = {
                "means": _round_trip_list(features.means),
                "stds": _round_trip_list(features.stds),
                "n_excluded": features.n_excluded,
            }
        return doc


def _round_trip_list(arr) -> list:
    """Nested lists of floats via repr-exact round trip."""
    return np.asarray(arr, dtype=float).tolist()


def write_model_json(path: Path | str, model: ClusterModel,
                     features: FeatureMatrix | None = None) -> None:
    doc = model.to_json_dict(features)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
