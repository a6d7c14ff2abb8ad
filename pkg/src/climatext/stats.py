"""Ordinal encoding, Spearman correlation, distributions, cross-tabs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from .aggregate import ReportNarrative
from .errors import ZeroVariance
from .firms import ClassAssignment, class_code

# Semantic-order encodings (low -> high maturity/positivity).
SENTIMENT_CODES = {"risk": 0, "risk_opportunity": 1, "neutral": 2, "opportunity": 3}
COMMITMENT_CODES = {"no_commitment": 0, "commitment": 1}
SPECIFICITY_CODES = {"general": 0, "specific": 1}
NETZERO_CODES = {"no_reduction": 0, "reduction": 1, "reduction_netzero": 2, "netzero": 3}

ENCODINGS: dict[str, dict[str, int]] = {
    "sentiment": SENTIMENT_CODES,
    "commitment": COMMITMENT_CODES,
    "specificity": SPECIFICITY_CODES,
    "netzero": NETZERO_CODES,
}

DECODINGS = {var: {code: label for label, code in table.items()}
             for var, table in ENCODINGS.items()}

NARRATIVE_VARIABLES = ("sentiment", "commitment", "specificity", "netzero")
CLASS_VARIABLES = ("cap_class", "emp_class", "ei_class", "ej_class", "ek_class")

# Ordered category labels per variable, for distribution/cross-tab axes.
VARIABLE_CATEGORIES: dict[str, tuple[str, ...]] = {
    "sentiment": tuple(SENTIMENT_CODES),
    "commitment": tuple(COMMITMENT_CODES),
    "specificity": tuple(SPECIFICITY_CODES),
    "netzero": tuple(NETZERO_CODES),
    "cap_class": tuple(f"Cap_{i}" for i in range(1, 9)),
    "emp_class": tuple(f"Emp_{i:02d}" for i in range(1, 9)),
    "ei_class": tuple(f"C{i}" for i in range(1, 9)),
    "ej_class": tuple(f"C{i}" for i in range(1, 9)),
    "ek_class": tuple(f"C{i}" for i in range(1, 9)),
    "sector": (),  # categories inferred from data, alphabetical
}


@dataclass(frozen=True)
class EncodedRecord:
    firm_id: str
    sentiment_code: int
    commitment_code: int
    specificity_code: int
    netzero_code: int
    cap_code: int | None = None
    emp_code: int | None = None
    ei_code: int | None = None
    ej_code: int | None = None
    ek_code: int | None = None
    sector: str | None = None

    def get(self, variable: str) -> int | str | None:
        mapping = {
            "sentiment": self.sentiment_code, "commitment": self.commitment_code,
            "specificity": self.specificity_code, "netzero": self.netzero_code,
            "cap_class": self.cap_code, "emp_class": self.emp_code,
            "ei_class": self.ei_code, "ej_class": self.ej_code,
            "ek_class": self.ek_code, "sector": self.sector,
        }
        return mapping[variable]

    def category(self, variable: str) -> str | None:
        """Human-readable category value for ``variable`` (None if missing)."""
        value = self.get(variable)
        if value is None:
            return None
        if variable in DECODINGS:
            return DECODINGS[variable][int(value)]
        if variable == "sector":
            return str(value)
        return VARIABLE_CATEGORIES[variable][int(value)]


def encode(narrative: ReportNarrative,
           classes: ClassAssignment | None = None,
           sector: str | None = None) -> EncodedRecord:
    """Exact table mapping of global labels (+ class bins) to ordinals."""
    return EncodedRecord(
        firm_id=narrative.firm_id,
        sentiment_code=SENTIMENT_CODES[narrative.sentiment_global],
        commitment_code=COMMITMENT_CODES[narrative.commitment_global],
        specificity_code=SPECIFICITY_CODES[narrative.specificity_global],
        netzero_code=NETZERO_CODES[narrative.netzero_global],
        cap_code=class_code(classes.cap_class) if classes else None,
        emp_code=class_code(classes.emp_class) if classes else None,
        ei_code=class_code(classes.ei_class) if classes else None,
        ej_code=class_code(classes.ej_class) if classes else None,
        ek_code=class_code(classes.ek_class) if classes else None,
        sector=sector,
    )


def decode(record: EncodedRecord) -> dict[str, str]:
    return {var: DECODINGS[var][int(record.get(var))] for var in NARRATIVE_VARIABLES}


# --- Spearman ----------------------------------------------------------------


def midranks(values) -> np.ndarray:
    """Average ranks (1-based); tied values share their rank midpoint."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    sv = v[order]
    i = 0
    while i < len(sv):
        j = i
        while j + 1 < len(sv) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> tuple[float, float]:
    """Spearman rho with average-rank ties + two-sided t-approximation p.

    Raises ZeroVariance when either vector is constant.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be equal-length 1-D vectors")
    n = len(x)
    if n < 3:
        raise ValueError("need n >= 3")
    rx = midranks(x)
    ry = midranks(y)
    rxc = rx - rx.mean()
    ryc = ry - ry.mean()
    ssx = float(rxc @ rxc)
    ssy = float(ryc @ ryc)
    if ssx == 0.0 or ssy == 0.0:
        raise ZeroVariance("constant input vector; rho undefined")
    rho = float(rxc @ ryc) / math.sqrt(ssx * ssy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), n - 2))
    return rho, min(p, 1.0)


@dataclass(frozen=True)
class CorrelationMatrix:
    variables: tuple[str, ...]
    rho: tuple[tuple[float | None, ...], ...]
    pvalues: tuple[tuple[float | None, ...], ...]
    n_obs: tuple[tuple[int, ...], ...]


def correlation_matrix(records: list[EncodedRecord],
                       variables: tuple[str, ...] = NARRATIVE_VARIABLES
                       ) -> CorrelationMatrix:
    """Pairwise Spearman over ordinal variables, complete-case per pair.

    Constant vectors propagate as missing (None) cells, diagonal included.
    """
    if len(records) < 3:
        raise ValueError("need at least 3 records")
    k = len(variables)
    rho = [[None] * k for _ in range(k)]
    pval = [[None] * k for _ in range(k)]
    nobs = [[0] * k for _ in range(k)]
    columns = {var: [rec.get(var) for rec in records] for var in variables}
    for i in range(k):
        for j in range(i, k):
            pairs = [(a, b) for a, b in zip(columns[variables[i]],
                                            columns[variables[j]])
                     if a is not None and b is not None]
            nobs[i][j] = nobs[j][i] = len(pairs)
            if len(pairs) < 3:
                continue
            xs = [a for a, _ in pairs]
            ys = [b for _, b in pairs]
            try:
                r, p = spearman(xs, ys)
            except ZeroVariance:
                continue
            rho[i][j] = rho[j][i] = r
            pval[i][j] = pval[j][i] = p
    return CorrelationMatrix(
        variables=tuple(variables),
        rho=tuple(tuple(row) for row in rho),
        pvalues=tuple(tuple(row) for row in pval),
        n_obs=tuple(tuple(row) for row in nobs),
    )


# --- distributions and cross-tabs ---------------------------------------------


@dataclass(frozen=True)
class Distribution:
    variable: str
    categories: tuple[str, ...]
    counts: tuple[int, ...]
    total: int

    def percentage(self, category: str) -> float:
        return 100.0 * self.counts[self.categories.index(category)] / self.total


def _categories_for(variable: str, records: list[EncodedRecord]) -> tuple[str, ...]:
    fixed = VARIABLE_CATEGORIES.get(variable, ())
    if fixed:
        return fixed
    seen = sorted({rec.category(variable) for rec in records
                   if rec.category(variable) is not None})
    return tuple(seen)


def overall_distribution(records: list[EncodedRecord],
                         variable: str) -> Distribution:
    """Counts and percentages of one variable (missing values excluded)."""
    if not records:
        raise ValueError("no records")
    cats = _categories_for(variable, records)
    counts = {c: 0 for c in cats}
    for rec in records:
        c = rec.category(variable)
        if c is not None:
            counts[c] += 1
    total = sum(counts.values())
    return Distribution(variable=variable, categories=cats,
                        counts=tuple(counts[c] for c in cats), total=total)


@dataclass(frozen=True)
class CrossTab:
    row_variable: str
    col_variable: str
    row_categories: tuple[str, ...]
    col_categories: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    @property
    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    @property
    def total(self) -> int:
        return sum(self.row_totals)

    def row_pcts(self) -> tuple[tuple[float, ...], ...]:
        """Row percentages; empty rows yield NaN (rendered '0 (nan%)')."""
        out = []
        for row, tot in zip(self.counts, self.row_totals):
            out.append(tuple(100.0 * c / tot if tot else math.nan for c in row))
        return tuple(out)


def crosstab(records: list[EncodedRecord], row_variable: str,
             col_variable: str) -> CrossTab:
    """Count matrix of two categorical variables, complete-case."""
    row_cats = _categories_for(row_variable, records)
    col_cats = _categories_for(col_variable, records)
    idx_r = {c: i for i, c in enumerate(row_cats)}
    idx_c = {c: i for i, c in enumerate(col_cats)}
    counts = [[0] * len(col_cats) for _ in row_cats]
    for rec in records:
        r = rec.category(row_variable)
        c = rec.category(col_variable)
        if r is None or c is None:
            continue
        counts[idx_r[r]][idx_c[c]] += 1
    return CrossTab(row_variable=row_variable, col_variable=col_variable,
                    row_categories=row_cats, col_categories=col_cats,
                    counts=tuple(tuple(row) for row in counts))


def fmt_pct(value: float) -> str:
    """One-decimal percentage; NaN renders as 'nan'."""
    return "nan" if math.isnan(value) else f"{value:.1f}"
