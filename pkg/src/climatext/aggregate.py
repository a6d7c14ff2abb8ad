"""Report-level narrative labels from per-paragraph verdicts.

Ratios of paragraph labels are compared against fractional thresholds
(strict ``>`` by default: a report exactly at a threshold falls through
to the neutral/no_reduction branch). The ratio denominator is the
keyword-retained classified paragraph set, since filtering precedes
classification.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classify import ParagraphLabels
from .errors import EmptyReport

SENTIMENT_GLOBALS = ("risk", "risk_opportunity", "neutral", "opportunity")
COMMITMENT_GLOBALS = ("no_commitment", "commitment")
SPECIFICITY_GLOBALS = ("general", "specific")
NETZERO_GLOBALS = ("no_reduction", "reduction", "reduction_netzero", "netzero")

RATIO_KEYS = ("risk", "opportunity", "commitment", "specific", "netzero", "reduction")


@dataclass(frozen=True)
class AggregationConfig:
    sentiment_threshold: float = 0.30
    commitment_threshold: float = 0.40
    specificity_threshold: float = 0.40
    target_threshold: float = 0.30
    strict_inequality: bool = True
    # Compatibility switch: swaps the two single-exceedance target labels
    # (sole netzero exceedance -> "reduction" and vice versa). Off by
    # default; the semantically consistent mapping is the contract.
    swap_single_target_labels: bool = False
    # Optional per-axis confidence gate on label counting: a paragraph
    # only enters an axis's ratio (numerator and denominator) when its
    # top score on that axis reaches this value. 0.0 = raw argmax.
    min_confidence: float = 0.0

    def __post_init__(self):
        for name in ("sentiment_threshold", "commitment_threshold",
                     "specificity_threshold", "target_threshold"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0,1), got {v}")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError(f"min_confidence must be in [0,1], "
                             f"got {self.min_confidence}")

    def exceeds(self, ratio: float, threshold: float) -> bool:
        return ratio > threshold if self.strict_inequality else ratio >= threshold


@dataclass(frozen=True)
class ReportNarrative:
    firm_id: str
    ratios: dict[str, float]
    sentiment_global: str
    commitment_global: str
    specificity_global: str
    netzero_global: str
    n_paragraphs: int

    def __post_init__(self):
        if self.n_paragraphs < 1:
            raise ValueError("n_paragraphs must be >= 1")
        for key in RATIO_KEYS:
            r = self.ratios.get(key)
            if r is None or not 0.0 <= r <= 1.0:
                raise ValueError(f"ratio {key}={r!r} outside [0,1]")
        if self.ratios["risk"] + self.ratios["opportunity"] > 1 + 1e-9:
            raise ValueError("risk + opportunity ratios exceed 1")


def labels_from_ratios(ratios: dict[str, float],
                       cfg: AggregationConfig) -> dict[str, str]:
    """Pure rule application: ratio tuple -> the four global labels."""
    t = cfg.sentiment_threshold
    risk_hi = cfg.exceeds(ratios["risk"], t)
    opp_hi = cfg.exceeds(ratios["opportunity"], t)
    if risk_hi and opp_hi:
        sentiment = "risk_opportunity"
    elif risk_hi:
        sentiment = "risk"
    elif opp_hi:
        sentiment = "opportunity"
    else:
        sentiment = "neutral"

    commitment = ("commitment"
                  if cfg.exceeds(ratios["commitment"], cfg.commitment_threshold)
                  else "no_commitment")
    specificity = ("specific"
                   if cfg.exceeds(ratios["specific"], cfg.specificity_threshold)
                   else "general")

    tt = cfg.target_threshold
    nz_hi = cfg.exceeds(ratios["netzero"], tt)
    red_hi = cfg.exceeds(ratios["reduction"], tt)
    if nz_hi and red_hi:
        netzero = "reduction_netzero"
    elif nz_hi:
        netzero = "reduction" if cfg.swap_single_target_labels else "netzero"
    elif red_hi:
        netzero = "netzero" if cfg.swap_single_target_labels else "reduction"
    else:
        netzero = "no_reduction"

    return {"sentiment_global": sentiment, "commitment_global": commitment,
            "specificity_global": specificity, "netzero_global": netzero}


_AXIS_OF = {"risk": "sentiment", "opportunity": "sentiment",
            "commitment": "commitment", "specific": "specificity",
            "netzero": "target", "reduction": "target"}


def ratios_from_labels(labels: list[ParagraphLabels],
                       min_confidence: float = 0.0) -> dict[str, float]:
    """Per-axis label ratios; the optional confidence gate drops a
    paragraph from an axis (numerator and denominator) when its top
    score there is below the gate."""
    counts = {key: 0 for key in RATIO_KEYS}
    denominators = {axis: 0 for axis in
                    ("sentiment", "commitment", "specificity", "target")}

    def confident(pl: ParagraphLabels, axis: str) -> bool:
        if min_confidence <= 0.0:
            return True
        vec = pl.scores.get(axis)
        return vec is None or max(vec) >= min_confidence

    for pl in labels:
        for axis in denominators:
            if confident(pl, axis):
                denominators[axis] += 1
        if confident(pl, "sentiment"):
            if pl.sentiment == "risk":
                counts["risk"] += 1
            elif pl.sentiment == "opportunity":
                counts["opportunity"] += 1
        if confident(pl, "commitment") and pl.commitment == "commitment":
            counts["commitment"] += 1
        if confident(pl, "specificity") and pl.specificity == "specific":
            counts["specific"] += 1
        if confident(pl, "target"):
            if pl.target == "netzero":
                counts["netzero"] += 1
            elif pl.target == "reduction":
                counts["reduction"] += 1
    return {key: (counts[key] / denominators[_AXIS_OF[key]]
                  if denominators[_AXIS_OF[key]] else 0.0)
            for key in RATIO_KEYS}


def aggregate(labels: list[ParagraphLabels], cfg: AggregationConfig | None = None,
              firm_id: str = "") -> ReportNarrative:
    """Threshold aggregation of one report's paragraph labels."""
    cfg = cfg or AggregationConfig()
    if not labels:
        raise EmptyReport(f"no classified paragraphs for firm {firm_id!r}")
    ratios = ratios_from_labels(labels, min_confidence=cfg.min_confidence)
    globals_ = labels_from_ratios(ratios, cfg)
    return ReportNarrative(firm_id=firm_id, ratios=ratios,
                           n_paragraphs=len(labels), **globals_)


@dataclass(frozen=True)
class CorpusNarratives:
    narratives: dict[str, ReportNarrative]
    skipped: list[str] = field(default_factory=list)  # firms with no paragraphs


def aggregate_corpus(per_firm: dict[str, list[ParagraphLabels]],
                     cfg: AggregationConfig | None = None) -> CorpusNarratives:
    """One narrative per firm; empty firms land on the skip list, never
    silently dropped."""
    cfg = cfg or AggregationConfig()
    narratives: dict[str, ReportNarrative] = {}
    skipped: list[str] = []
    for firm_id, labels in per_firm.items():
        try:
            narratives[firm_id] = aggregate(labels, cfg, firm_id=firm_id)
        except EmptyReport:
            skipped.append(firm_id)
    return CorpusNarratives(narratives=narratives, skipped=skipped)


NARRATIVE_CSV_COLUMNS = (
    ["firm_id", "n_paragraphs"] + [f"ratio_{k}" for k in RATIO_KEYS]
    + ["sentiment_global", "commitment_global", "specificity_global", "netzero_global"]
)


def write_narratives_csv(path: Path | str, result: CorpusNarratives) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(NARRATIVE_CSV_COLUMNS)
        for firm_id in sorted(result.narratives):
            n = result.narratives[firm_id]
            w.writerow([n.firm_id, n.n_paragraphs]
                       + [f"{n.ratios[k]:.10g}" for k in RATIO_KEYS]
                       + [n.sentiment_global, n.commitment_global,
                          n.specificity_global, n.netzero_global])


def read_narratives_csv(path: Path | str) -> CorpusNarratives:
    narratives: dict[str, ReportNarrative] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            ratios = {k: float(row[f"ratio_{k}"]) for k in RATIO_KEYS}
            narratives[row["firm_id"]] = ReportNarrative(
                firm_id=row["firm_id"], ratios=ratios,
                n_paragraphs=int(row["n_paragraphs"]),
                sentiment_global=row["sentiment_global"],
                commitment_global=row["commitment_global"],
                specificity_global=row["specificity_global"],
                netzero_global=row["netzero_global"])
    return CorpusNarratives(narratives=narratives)


def relabel(narrative: ReportNarrative, cfg: AggregationConfig) -> ReportNarrative:
    """Recompute the four global labels from stored ratios under ``cfg``."""
    globals_ = labels_from_ratios(narrative.ratios, cfg)
    return replace(narrative, **globals_)
