"""Clustering engine: standardization, KMeans, GMM, PCA, profiling."""

from .features import FEATURE_COLUMNS, FeatureMatrix, build_features, standardize
from .gmm import gmm_fit, n_parameters, select_k_bic
from .kernels import BACKEND as KERNEL_BACKEND
from .kmeans import elbow_knee, elbow_scan, kmeans_fit
from .model import ClusterModel, write_model_json
from .pca import PcaResult, pca_project
from .profile import ClusterProfile, profile_clusters

__all__ = [
    "FEATURE_COLUMNS",
    "FeatureMatrix",
    "build_features",
    "standardize",
    "gmm_fit",
    "n_parameters",
    "select_k_bic",
    "KERNEL_BACKEND",
    "elbow_knee",
    "elbow_scan",
    "kmeans_fit",
    "ClusterModel",
    "write_model_json",
    "PcaResult",
    "pca_project",
    "ClusterProfile",
    "profile_clusters",
]
