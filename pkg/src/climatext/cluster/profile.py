"""Cluster profiling in original feature units."""

from __future__ import annotations

from dataclasses import dataclass

from ..firms import FirmRecord
from .features import FeatureMatrix
from .model import ClusterModel


@dataclass(frozen=True)
class ClusterProfile:
    cluster: int
    count: int
    centroid_original: tuple[float, ...]
    sector_counts: dict[str, int]
    cap_class_counts: dict[str, int]
    emp_class_counts: dict[str, int]
    firm_ids: tuple[str, ...]


def profile_clusters(model: ClusterModel, features: FeatureMatrix,
                     firms: dict[str, FirmRecord] | None = None,
                     class_assignments: dict | None = None) -> list[ClusterProfile]:
    """Per-cluster membership, centroid (original units), and composition.

    ``firms``/``class_assignments`` enrich the profile when available;
    counts always partition the clustered row set.
    """
    if len(model.assignments) != features.n_rows:
        raise ValueError("model was not fitted on this feature matrix")
    members: dict[int, list[str]] = {c: [] for c in range(model.k)}
    for firm_id, cluster in zip(features.firm_ids, model.assignments):
        members[int(cluster)].append(firm_id)
    profiles = []
    for c in range(model.k):
        ids = members[c]
        sectors: dict[str, int] = {}
        caps: dict[str, int] = {}
        emps: dict[str, int] = {}
        for firm_id in ids:
            if firms and firm_id in firms:
                s = firms[firm_id].sector
                sectors[s] = sectors.get(s, 0) + 1
            if class_assignments and firm_id in class_assignments:
                ca = class_assignments[firm_id]
                caps[ca.cap_class] = caps.get(ca.cap_class, 0) + 1
                emps[ca.emp_class] = emps.get(ca.emp_class, 0) + 1
        profiles.append(ClusterProfile(
            cluster=c, count=len(ids),
            centroid_original=tuple(float(v) for v in model.centroids_original[c]),
            sector_counts=dict(sorted(sectors.items())),
            cap_class_counts=dict(sorted(caps.items())),
            emp_class_counts=dict(sorted(emps.items())),
            firm_ids=tuple(ids)))
    assert sum(p.count for p in profiles) == features.n_rows
    return profiles
