# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled clustering kernels (hot loops of KMeans and diagonal GMM).

Contracts mirror _kernels_py; the .kernels shim picks whichever import
succeeds.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()

BACKEND = "cython"

M_LOG_2PI = 1.8378770664093453


def assign_labels(cnp.ndarray[cnp.float64_t, ndim=2] X,
                  cnp.ndarray[cnp.float64_t, ndim=2] centroids):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], k = centroids.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.empty(n, dtype=np.int64)
    cdef double inertia = 0.0
    cdef double best, dist, diff
    cdef Py_ssize_t i, j, c, best_j
    for i in range(n):
        best = -1.0
        best_j = 0
        for j in range(k):
            dist = 0.0
            for c in range(d):
                diff = X[i, c] - centroids[j, c]
                dist += diff * diff
            if best < 0.0 or dist < best:
                best = dist
                best_j = j
        labels[i] = best_j
        inertia += best
    return labels, inertia


def update_centroids(cnp.ndarray[cnp.float64_t, ndim=2] X,
                     cnp.ndarray[cnp.int64_t, ndim=1] labels,
                     Py_ssize_t k):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sums = np.zeros((k, d), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(k, dtype=np.int64)
    cdef Py_ssize_t i, c, lab
    for i in range(n):
        lab = labels[i]
        counts[lab] += 1
        for c in range(d):
            sums[lab, c] += X[i, c]
    return sums, counts


def min_sqdist(cnp.ndarray[cnp.float64_t, ndim=2] X,
               cnp.ndarray[cnp.float64_t, ndim=2] centroids):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], k = centroids.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double best, dist, diff
    cdef Py_ssize_t i, j, c
    for i in range(n):
        best = -1.0
        for j in range(k):
            dist = 0.0
            for c in range(d):
                diff = X[i, c] - centroids[j, c]
                dist += diff * diff
            if best < 0.0 or dist < best:
                best = dist
        out[i] = best
    return out


def gmm_estep_diag(cnp.ndarray[cnp.float64_t, ndim=2] X,
                   cnp.ndarray[cnp.float64_t, ndim=2] means,
                   cnp.ndarray[cnp.float64_t, ndim=2] variances,
                   cnp.ndarray[cnp.float64_t, ndim=1] log_weights):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], k = means.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] resp = np.empty((n, k), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] log_det = np.empty(k, dtype=np.float64)
    cdef double acc, diff, m, s, loglik = 0.0
    cdef Py_ssize_t i, j, c
    for j in range(k):
        acc = 0.0
        for c in range(d):
            acc += log(variances[j, c])
        log_det[j] = acc
    for i in range(n):
        m = 0.0
        for j in range(k):
            acc = 0.0
            for c in range(d):
                diff = X[i, c] - means[j, c]
                acc += diff * diff / variances[j, c]
            acc = -0.5 * (d * M_LOG_2PI + log_det[j] + acc) + log_weights[j]
            resp[i, j] = acc
            if j == 0 or acc > m:
                m = acc
        s = 0.0
        for j in range(k):
            s += exp(resp[i, j] - m)
        s = m + log(s)
        loglik += s
        for j in range(k):
            resp[i, j] = exp(resp[i, j] - s)
    return resp, loglik
