"""Feature assembly and standardization for clustering.

Feature columns: the four narrative codes plus scope-1/scope-2 emission
class codes. Scope 3 is left out (too many missing values); rows missing
a scope-1/2 class are excluded and counted rather than imputed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..stats import EncodedRecord

log = logging.getLogger(__name__)

FEATURE_COLUMNS = ("sentiment", "commitment", "specificity", "netzero",
                   "scope1_class", "scope2_class")


@dataclass(frozen=True)
class FeatureMatrix:
    columns: tuple[str, ...]
    firm_ids: tuple[str, ...]
    values: np.ndarray            # raw (original units), shape (n, d)
    std_values: np.ndarray        # z-scored, shape (n, d)
    means: np.ndarray             # per-column mean
    stds: np.ndarray              # per-column sample std (0 for constants)
    constant_columns: tuple[bool, ...]
    n_excluded: int = 0

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def inverse_transform(self, z: np.ndarray) -> np.ndarray:
        """Exact inverse of the z-scoring: mean + std * z."""
        return self.means + self.stds * np.asarray(z, dtype=float)


def standardize(values: np.ndarray, columns: tuple[str, ...],
                firm_ids: tuple[str, ...] = (), n_excluded: int = 0) -> FeatureMatrix:
    """Per-column z-scoring with sample (n-1) standard deviation.

    Constant columns pass through as zeros with a warning; the stored
    mean/std still invert exactly.
    """
    X = np.asarray(values, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least 2 rows")
    means = X.mean(axis=0)
    stds = X.std(axis=0, ddof=1)
    constant = stds == 0.0
    if constant.any():
        bad = [columns[i] for i in np.flatnonzero(constant)]
        log.warning("constant feature columns passed through at 0: %s", bad)
    safe = np.where(constant, 1.0, stds)
    Z = (X - means) / safe
    Z[:, constant] = 0.0
    if not firm_ids:
        firm_ids = tuple(str(i) for i in range(X.shape[0]))
    return FeatureMatrix(columns=tuple(columns), firm_ids=tuple(firm_ids),
                         values=X, std_values=Z, means=means,
                         stds=np.where(constant, 0.0, stds),
                         constant_columns=tuple(bool(c) for c in constant),
                         n_excluded=n_excluded)


def build_features(records: list[EncodedRecord]) -> FeatureMatrix:
    """FeatureMatrix from encoded records, dropping rows with missing
    scope-1/scope-2 classes (count kept in n_excluded)."""
    rows, ids = [], []
    excluded = 0
    for rec in records:
        if rec.ei_code is None or rec.ej_code is None:
            excluded += 1
            continue
        rows.append([rec.sentiment_code, rec.commitment_code,
                     rec.specificity_code, rec.netzero_code,
                     rec.ei_code, rec.ej_code])
        ids.append(rec.firm_id)
    if len(rows) < 2:
        raise ValueError("fewer than 2 complete rows available for clustering")
    return standardize(np.asarray(rows, dtype=np.float64), FEATURE_COLUMNS,
                       tuple(ids), n_excluded=excluded)
