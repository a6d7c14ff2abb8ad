"""Firm attributes: loading, validation, and 8-class binning.

Market-cap and employee class boundaries are fixed (published class
headers). Emission class edges are configuration: the default octile
binning computes empirical 12.5%-quantile edges over firms where the
scope is present, and the resolved edges go into the run manifest so a
run can be reproduced exactly.
"""

from __future__ import annotations

import csv
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DuplicateFirmId, SchemaMismatch

log = logging.getLogger(__name__)

# Sector labels as they appear in the source tables (French), with
# English aliases accepted on input.
SECTORS_FR = (
    "Communication",
    "Consommation cyclique",
    "Consommation non cyclique",
    "Finances",
    "Fournisseur",
    "Immobilier",
    "Industrie",
    "Matériaux de base",
    "Santé",
    "Technologie de l'information",
    "Énergie",
)

SECTOR_EN_TO_FR = {
    "communication": "Communication",
    "cyclical consumption": "Consommation cyclique",
    "consumer cyclical": "Consommation cyclique",
    "non-cyclical consumption": "Consommation non cyclique",
    "consumer defensive": "Consommation non cyclique",
    "finance": "Finances",
    "financials": "Finances",
    "suppliers": "Fournisseur",
    "utilities": "Fournisseur",
    "real estate": "Immobilier",
    "industry": "Industrie",
    "industrials": "Industrie",
    "basic materials": "Matériaux de base",
    "health care": "Santé",
    "healthcare": "Santé",
    "information technology": "Technologie de l'information",
    "technology": "Technologie de l'information",
    "energy": "Énergie",
}

_SECTOR_LOOKUP = {s.lower(): s for s in SECTORS_FR} | SECTOR_EN_TO_FR

# Class edges in billions / headcount. Internal edges are
# lower-inclusive/upper-exclusive; the open top class is strict
# (">240", ">250k"), so the exact top edge still belongs to class 7.
CAP_EDGES = (1.0, 4.0, 10.0, 20.0, 40.0, 80.0, 240.0)
EMP_EDGES = (250, 1_000, 5_000, 10_000, 40_000, 100_000, 250_000)

CAP_LABELS = tuple(f"Cap_{i}" for i in range(1, 9))
EMP_LABELS = tuple(f"Emp_{i:02d}" for i in range(1, 9))
EMISSION_LABELS = tuple(f"C{i}" for i in range(1, 9))

FIRM_CSV_COLUMNS = ["firm_id", "sector", "scope1", "scope2", "scope3",
                    "employees", "market_cap_bln"]

BINNING_MODES = ("octile", "log_edges", "explicit_edges")


@dataclass(frozen=True)
class FirmRecord:
    firm_id: str
    sector: str
    scope1: float | None
    scope2: float | None
    scope3: float | None
    employees: int
    market_cap: float  # billions

    def __post_init__(self):
        if not self.firm_id:
            raise ValueError("firm_id must be non-empty")
        if self.sector not in SECTORS_FR:
            raise ValueError(f"unknown sector {self.sector!r}")
        for name in ("scope1", "scope2", "scope3"):
            v = getattr(self, name)
            if v is not None and (not math.isfinite(v) or v < 0):
                raise ValueError(f"{name} must be >= 0 when present, got {v}")
        if self.employees < 1:
            raise ValueError(f"employees must be >= 1, got {self.employees}")
        if not (math.isfinite(self.market_cap) and self.market_cap > 0):
            raise ValueError(f"market_cap must be > 0, got {self.market_cap}")


@dataclass(frozen=True)
class ClassAssignment:
    firm_id: str
    cap_class: str
    emp_class: str
    ei_class: str | None  # scope 1
    ej_class: str | None  # scope 2
    ek_class: str | None  # scope 3


@dataclass
class LoadReport:
    n_rows: int = 0
    n_loaded: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)  # (line, reason)
    missing_counts: dict[str, int] = field(
        default_factory=lambda: {"scope1": 0, "scope2": 0, "scope3": 0})


def normalize_sector(raw: str) -> str:
    sector = _SECTOR_LOOKUP.get(raw.strip().lower())
    if sector is None:
        raise ValueError(f"unknown sector {raw!r}")
    return sector


def _parse_optional_float(raw: str) -> float | None:
    raw = raw.strip().replace(",", "")
    if raw == "" or raw.lower() in ("na", "nan", "none"):
        return None
    return float(raw)


def load_firms(csv_path: Path | str) -> tuple[list[FirmRecord], LoadReport]:
    """Stream the firm CSV; reject malformed rows with line numbers."""
    csv_path = Path(csv_path)
    report = LoadReport()
    firms: list[FirmRecord] = []
    seen: set[str] = set()
    with open(csv_path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = [c.strip() for c in reader.fieldnames or []]
        if header != FIRM_CSV_COLUMNS:
            raise SchemaMismatch(
                f"firm CSV header must be {FIRM_CSV_COLUMNS}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            report.n_rows += 1
            firm_id = (row["firm_id"] or "").strip()
            if firm_id in seen:
                raise DuplicateFirmId(f"line {lineno}: duplicate firm_id {firm_id!r}")
            try:
                scopes = {name: _parse_optional_float(row[name])
                          for name in ("scope1", "scope2", "scope3")}
                rec = FirmRecord(
                    firm_id=firm_id,
                    sector=normalize_sector(row["sector"]),
                    scope1=scopes["scope1"], scope2=scopes["scope2"],
                    scope3=scopes["scope3"],
                    employees=int(row["employees"].strip().replace(",", "")),
                    market_cap=float(row["market_cap_bln"].strip().replace(",", "")),
                )
            except (ValueError, KeyError) as exc:
                report.rejected.append((lineno, str(exc)))
                continue
            seen.add(firm_id)
            firms.append(rec)
            report.n_loaded += 1
            for name in ("scope1", "scope2", "scope3"):
                if scopes[name] is None:
                    report.missing_counts[name] += 1
    return firms, report


def _assign_topclosed(value: float, edges: tuple, labels: tuple[str, ...]) -> str:
    """Lower-inclusive bins; the exact top edge stays in the next-to-last
    class because the last class is a strict '>' open interval."""
    if value > edges[-1]:
        return labels[-1]
    if value == edges[-1]:
        return labels[-2]
    return labels[bisect_right(edges, value)]


def assign_cap_class(market_cap_bln: float) -> str:
    if not market_cap_bln > 0:
        raise ValueError("market_cap must be > 0")
    return _assign_topclosed(market_cap_bln, CAP_EDGES, CAP_LABELS)


def assign_emp_class(employees: int) -> str:
    if employees < 1:
        raise ValueError("employees must be >= 1")
    return _assign_topclosed(float(employees), EMP_EDGES, EMP_LABELS)


def class_code(label: str | None) -> int | None:
    """Ordinal code 0..7 for any class label (Cap_3 -> 2, C8 -> 7)."""
    if label is None:
        return None
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits) - 1


def octile_edges(values: list[float]) -> tuple[list[float], bool]:
    """Empirical 12.5%-quantile edges. Returns (edges, degenerate flag);
    with fewer than 8 distinct values the deduplicated edges span fewer
    than 8 occupied classes (fallback, warned)."""
    arr = np.asarray(sorted(values), dtype=float)
    raw = [float(np.quantile(arr, q / 8)) for q in range(1, 8)]
    edges, degenerate = [], len(set(arr.tolist())) < 8
    for e in raw:
        if not edges or e > edges[-1]:
            edges.append(e)
    return edges, degenerate


def log_spaced_edges(values: list[float]) -> list[float]:
    positive = [v for v in values if v > 0]
    if not positive:
        return []
    lo, hi = min(positive), max(positive)
    if lo == hi:
        return []
    step = (math.log(hi) - math.log(lo)) / 8
    return [math.exp(math.log(lo) + step * i) for i in range(1, 8)]


def _assign_open(value: float, edges: list[float], labels=EMISSION_LABELS) -> str:
    # lower-inclusive bins over possibly-deduplicated edges
    return labels[min(bisect_right(edges, value), len(edges))]


def assign_emission_classes(
    firms: list[FirmRecord],
    binning: str = "octile",
    explicit_edges: dict[str, list[float]] | None = None,
) -> tuple[dict[str, ClassAssignment], dict[str, list[float]]]:
    """Per-scope C1..C8 classes over firms where that scope is present.

    Missing emissions stay missing (no imputation, no default class).
    Returns the assignments plus the resolved edges per scope for the run
    manifest.
    """
    if binning not in BINNING_MODES:
        raise ValueError(f"binning must be one of {BINNING_MODES}")
    scopes = ("scope1", "scope2", "scope3")
    edges_by_scope: dict[str, list[float]] = {}
    for scope in scopes:
        present = [getattr(f, scope) for f in firms if getattr(f, scope) is not None]
        if not present:
            edges_by_scope[scope] = []
            continue
        if binning == "octile":
            edges, degenerate = octile_edges(present)
            if degenerate:
                log.warning("%s: fewer than 8 distinct values; %d occupied "
                            "classes", scope, len(edges) + 1)
        elif binning == "log_edges":
            edges = log_spaced_edges(present)
        else:
            if explicit_edges is None or scope not in explicit_edges:
                raise ValueError(f"explicit_edges missing entry for {scope}")
            edges = list(explicit_edges[scope])
            if len(edges) != 7 or any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError(f"{scope}: need 7 strictly increasing edges")
        edges_by_scope[scope] = edges

    assignments: dict[str, ClassAssignment] = {}
    for f in firms:
        cls: dict[str, str | None] = {}
        for scope, key in zip(scopes, ("ei_class", "ej_class", "ek_class")):
            v = getattr(f, scope)
            cls[key] = None if v is None else _assign_open(v, edges_by_scope[scope])
        assignments[f.firm_id] = ClassAssignment(
            firm_id=f.firm_id,
            cap_class=assign_cap_class(f.market_cap),
            emp_class=assign_emp_class(f.employees),
            **cls)
    return assignments, edges_by_scope
