"""Rendering of tables, figures, and the run manifest."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..cluster import ClusterModel, FeatureMatrix, PcaResult
from ..errors import MissingAnalysis
from ..stats import CorrelationMatrix, CrossTab, Distribution
from .figures import elbow_svg, heatmap_svg, scatter_svg
from .manifest import build_manifest, file_sha256, strip_timestamp, write_manifest
from .tables import (
    crosstab_csv,
    crosstab_md,
    distribution_csv,
    distribution_md,
    matrix_csv,
    matrix_json,
)

__all__ = [
    "AnalysisBundle",
    "render_tables",
    "render_figures",
    "build_manifest",
    "write_manifest",
    "strip_timestamp",
    "file_sha256",
    "crosstab_csv",
    "crosstab_md",
    "distribution_csv",
    "distribution_md",
    "matrix_csv",
    "matrix_json",
    "heatmap_svg",
    "elbow_svg",
    "scatter_svg",
]


@dataclass
class AnalysisBundle:
    """Everything the renderers need, already computed."""

    distributions: list[Distribution] = field(default_factory=list)
    correlation: CorrelationMatrix | None = None
    crosstabs: list[CrossTab] = field(default_factory=list)
    cluster_model: ClusterModel | None = None
    features: FeatureMatrix | None = None
    elbow: dict[int, float] | None = None
    bic: dict[int, float] | None = None
    pca: PcaResult | None = None


def render_tables(bundle: AnalysisBundle, out_dir: Path | str) -> list[Path]:
    """Write CSV + Markdown tables; returns the files written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, content: str) -> None:
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)

    if bundle.distributions:
        emit("global_distribution.csv", distribution_csv(bundle.distributions))
        emit("global_distribution.md", distribution_md(bundle.distributions))
    if bundle.correlation is not None:
        emit("correlation_rho.csv", matrix_csv(bundle.correlation, "rho"))
        emit("correlation_pvalues.csv", matrix_csv(bundle.correlation, "pvalues"))
        emit("correlation_matrix.json", matrix_json(bundle.correlation))
    for ct in bundle.crosstabs:
        stem = f"crosstab_{ct.row_variable}_by_{ct.col_variable}"
        emit(f"{stem}.csv", crosstab_csv(ct))
        emit(f"{stem}.md", crosstab_md(ct))
    if bundle.cluster_model is not None:
        emit("cluster_counts.csv", _cluster_counts_csv(bundle.cluster_model))
        emit("cluster_centroids_original.csv",
             _centroids_csv(bundle.cluster_model, bundle.features))
    if bundle.elbow:
        emit("elbow_inertia.csv", _kv_csv("k", "inertia", bundle.elbow))
    if bundle.bic:
        emit("bic_curve.csv", _kv_csv("k", "bic", bundle.bic))
    if bundle.pca is not None and bundle.cluster_model is not None:
        emit("pca_coordinates.csv",
             _pca_csv(bundle.pca, bundle.cluster_model, bundle.features))
    return written


def render_figures(bundle: AnalysisBundle, out_dir: Path | str) -> list[Path]:
    """Write the SVG figures; missing analyses raise MissingAnalysis."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if bundle.correlation is None:
        raise MissingAnalysis("correlation matrix absent; cannot render heatmap")
    heat = heatmap_svg(bundle.correlation.variables, bundle.correlation.rho,
                       "Spearman rank correlation (semantic encoding)")
    path = out_dir / "correlation_heatmap.svg"
    path.write_text(heat, encoding="utf-8")
    written.append(path)
    if bundle.elbow:
        path = out_dir / "elbow_inertia.svg"
        path.write_text(elbow_svg(bundle.elbow, "Inertia vs number of clusters"),
                        encoding="utf-8")
        written.append(path)
    if bundle.pca is not None:
        if bundle.cluster_model is None:
            raise MissingAnalysis("cluster model absent; cannot color PCA scatter")
        path = out_dir / "pca_clusters.svg"
        path.write_text(
            scatter_svg(bundle.pca.projected[:, :2], bundle.cluster_model.assignments,
                        "Clusters in principal-component space"),
            encoding="utf-8")
        written.append(path)
    return written


def _cluster_counts_csv(model: ClusterModel) -> str:
    lines = ["cluster,count"]
    for c, n in enumerate(model.cluster_counts()):
        lines.append(f"{c},{n}")
    return "\n".join(lines) + "\n"


def _centroids_csv(model: ClusterModel, features: FeatureMatrix | None) -> str:
    cols = list(features.columns) if features is not None else [
        f"f{i}" for i in range(model.centroids_original.shape[1])]
    lines = ["cluster," + ",".join(cols)]
    for c, row in enumerate(np.asarray(model.centroids_original)):
        lines.append(f"{c}," + ",".join(f"{v:.6f}" for v in row))
    return "\n".join(lines) + "\n"


def _kv_csv(key: str, value: str, data: dict[int, float]) -> str:
    lines = [f"{key},{value}"]
    for k in sorted(data):
        lines.append(f"{k},{data[k]:.10g}")
    return "\n".join(lines) + "\n"


def _pca_csv(pca: PcaResult, model: ClusterModel,
             features: FeatureMatrix | None) -> str:
    n, d = pca.projected.shape
    ids = (list(features.firm_ids) if features is not None
           else [str(i) for i in range(n)])
    header = "firm_id,cluster," + ",".join(f"pc{i + 1}" for i in range(d))
    lines = [header]
    for fid, cluster, row in zip(ids, model.assignments, pca.projected):
        coords = ",".join(f"{v:.8f}" for v in row)
        lines.append(f"{fid},{int(cluster)},{coords}")
    return "\n".join(lines) + "\n"
