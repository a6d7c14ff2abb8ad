"""Gaussian mixture fitting by EM, with BIC model selection."""

from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels
from .features import FeatureMatrix
from .kmeans import kmeans_fit
from .model import ClusterModel

log = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-6
MAX_EM_ITER = 500
VARIANCE_FLOOR = 1e-6

COVARIANCE_KINDS = ("diagonal", "full")


def _estep_full(X, means, covariances, log_weights):
    n, d = X.shape
    k = means.shape[0]
    log_prob = np.empty((n, k))
    for j in range(k):
        try:
            chol = np.linalg.cholesky(covariances[j])
        except np.linalg.LinAlgError:
            chol = np.linalg.cholesky(covariances[j] + VARIANCE_FLOOR * np.eye(d))
        diff = X - means[j]
        z = solve_triangular(chol, diff.T, lower=True).T
        maha = np.einsum("ij,ij->i", z, z)
        log_det = 2.0 * np.log(np.diag(chol)).sum()
        log_prob[:, j] = (-0.5 * (d * np.log(2 * np.pi) + log_det + maha)
                          + log_weights[j])
    m = log_prob.max(axis=1, keepdims=True)
    norm = m[:, 0] + np.log(np.exp(log_prob - m).sum(axis=1))
    resp = np.exp(log_prob - norm[:, None])
    return resp, float(norm.sum())


def n_parameters(k: int, d: int, covariance: str) -> int:
    """Free parameters for the BIC penalty."""
    means = k * d
    weights = k - 1
    if covariance == "diagonal":
        return means + weights + k * d
    return means + weights + k * (d * (d + 1) // 2)


def gmm_fit(features: FeatureMatrix, k: int, seed: int = 0,
            covariance: str = "diagonal", n_restarts: int = 1) -> ClusterModel:
    """EM until the log-likelihood improves by < 1e-6 or 500 iterations.

    Initialized from a seeded KMeans partition; restarts (if > 1) vary
    the init stream, best final log-likelihood wins. Variances are
    floored at 1e-6 when degenerate, and flooring is recorded.
    """
    if covariance not in COVARIANCE_KINDS:
        raise ValueError(f"covariance must be one of {COVARIANCE_KINDS}")
    X = features.std_values
    n, d = X.shape
    if covariance == "full" and n <= k * d:
        raise ValueError(f"full covariance needs n > k*d ({n} <= {k * d})")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")

    best = None
    for r in range(max(1, n_restarts)):
        result = _fit_once(features, X, k, seed, r, covariance)
        if best is None or result["log_likelihood"] > best["log_likelihood"] + 1e-12:
            best = result
    p = n_parameters(k, d, covariance)
    bic = -2.0 * best["log_likelihood"] + p * np.log(n)
    resp = best["resp"]
    assignments = np.argmax(resp, axis=1).astype(np.int64)
    centroids_std = best["means"]
    return ClusterModel(
        method="gmm", k=k, assignments=assignments,
        centroids_std=centroids_std,
        centroids_original=features.inverse_transform(centroids_std),
        seed=seed, n_restarts=max(1, n_restarts),
        log_likelihood=float(best["log_likelihood"]),
        bic=float(bic),
        weights=best["weights"],
        responsibilities=resp,
        metadata={"covariance": covariance,
                  "iterations": best["iterations"],
                  "converged": best["converged"],
                  "variance_floor_applied": best["floored"],
                  "log_likelihood_path": best["ll_path"],
                  "n_parameters": p,
                  "kernel_backend": kernels.BACKEND})


def _fit_once(features: FeatureMatrix, X: np.ndarray, k: int, seed: int,
              restart: int, covariance: str) -> dict:
    n, d = X.shape
    init_model = kmeans_fit(features, k, seed=seed + restart * 7919, n_restarts=3)
    labels = init_model.assignments
    weights = np.bincount(labels, minlength=k).astype(float)
    weights = np.maximum(weights, 1.0)
    weights /= weights.sum()
    means = init_model.centroids_std.copy()
    floored = False
    if covariance == "diagonal":
        variances = np.empty((k, d))
        global_var = np.maximum(X.var(axis=0), VARIANCE_FLOOR)
        for j in range(k):
            member = X[labels == j]
            v = member.var(axis=0) if len(member) > 1 else global_var
            variances[j] = np.maximum(v, VARIANCE_FLOOR)
    else:
        covariances = np.empty((k, d, d))
        global_cov = np.cov(X.T) + VARIANCE_FLOOR * np.eye(d)
        for j in range(k):
            member = X[labels == j]
            if len(member) > d:
                covariances[j] = np.cov(member.T) + VARIANCE_FLOOR * np.eye(d)
            else:
                covariances[j] = global_cov

    prev_ll = -np.inf
    ll_path: list[float] = []
    resp = None
    converged = False
    it = 0
    for it in range(1, MAX_EM_ITER + 1):
        log_w = np.log(weights)
        if covariance == "diagonal":
            resp, ll = kernels.gmm_estep_diag(X, means, variances, log_w)
        else:
            resp, ll = _estep_full(X, means, covariances, log_w)
        ll_path.append(float(ll))
        if ll - prev_ll < CONVERGENCE_TOL and it > 1:
            converged = True
            break
        prev_ll = ll
        # M-step
        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 1e-12)
        weights = nk / n
        means = (resp.T @ X) / nk[:, None]
        if covariance == "diagonal":
            for j in range(k):
                diff = X - means[j]
                v = (resp[:, j][:, None] * diff * diff).sum(axis=0) / nk[j]
                if (v < VARIANCE_FLOOR).any():
                    floored = True
                variances[j] = np.maximum(v, VARIANCE_FLOOR)
        else:
            for j in range(k):
                diff = X - means[j]
                cov = (resp[:, j][:, None] * diff).T @ diff / nk[j]
                eig_floor = VARIANCE_FLOOR * np.eye(d)
                try:
                    np.linalg.cholesky(cov)
                except np.linalg.LinAlgError:
                    cov = cov + eig_floor
                    floored = True
                covariances[j] = cov
    return {"log_likelihood": ll_path[-1], "resp": resp, "means": means,
            "weights": weights, "iterations": it, "converged": converged,
            "floored": floored, "ll_path": ll_path}


def select_k_bic(features: FeatureMatrix, k_range, seed: int = 0,
                 covariance: str = "diagonal") -> tuple[int, dict[int, float]]:
    """argmin-BIC k over ``k_range``; failed fits are skipped with a warning."""
    bics: dict[int, float] = {}
    for k in sorted(set(int(k) for k in k_range)):
        try:
            model = gmm_fit(features, k, seed=seed, covariance=covariance)
        except (ValueError, np.linalg.LinAlgError) as exc:
            log.warning("gmm fit failed for k=%d: %s", k, exc)
            continue
        bics[k] = float(model.bic)
    if not bics:
        raise ValueError("no k in range could be fitted")
    best_k = min(sorted(bics), key=lambda k: bics[k])
    return best_k, bics
