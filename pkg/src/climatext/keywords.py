"""Keyword filtering of climate-relevant paragraphs.

Rule-based retention: a paragraph survives when any phrase of any group
occurs as a case-insensitive substring of its whitespace-normalized text.
Substring (not token-boundary) matching is deliberate; false positives
are tolerated because the downstream classifiers re-assess relevance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ingest import Paragraph

# Default phrase groups. Note "emission scopes" doubles as a group name
# and a phrase; it is deliberately kept in the phrase list as well.
# "co2" and "co_2" both stay: subscripts render inconsistently in PDFs
# and the normalizer below folds the variants together.
DEFAULT_GROUPS: dict[str, tuple[str, ...]] = {
    "greenhouse_gases": (
        "co2", "co_2", "ghg", "greenhouse gas", "carbon footprint",
    ),
    "emission_scopes": (
        "scope 1", "scope 2", "scope 3", "emission scopes",
    ),
    "targets_neutrality": (
        "net zero", "carbon neutrality", "emission reduction", "zero emission",
        "overall emissions", "cutting emissions", "emissions footprint",
        "climate target",
    ),
    "strategy_risks": (
        "decarbonization", "climate strategy", "transition risk",
        "carbon intensity", "climate change", "emission from", "direct emission",
    ),
}

_WS_RUN_RE = re.compile(r"\s+")
_SUBSCRIPT_2 = "₂"


def normalize_for_match(text: str) -> str:
    """Lowercase, fold CO2 subscripts to '2', collapse whitespace runs."""
    return _WS_RUN_RE.sub(" ", text.lower().replace(_SUBSCRIPT_2, "2")).strip()


@dataclass(frozen=True)
class KeywordSet:
    groups: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_GROUPS))

    def __post_init__(self):
        for name, phrases in self.groups.items():
            for p in phrases:
                if not p:
                    raise ValueError(f"empty phrase in group {name!r}")
                if p != p.lower():
                    raise ValueError(f"phrase {p!r} in group {name!r} is not lowercase")

    def with_extra(self, group: str, *phrases: str) -> "KeywordSet":
        groups = dict(self.groups)
        groups[group] = tuple(groups.get(group, ())) + tuple(phrases)
        return KeywordSet(groups=groups)


def matches(paragraph: Paragraph | str, keywords: KeywordSet | None = None) -> set[str]:
    """Names of every group with at least one phrase hit (possibly empty)."""
    keywords = keywords or KeywordSet()
    text = paragraph.text if isinstance(paragraph, Paragraph) else paragraph
    hay = normalize_for_match(text)
    hit = set()
    for name, phrases in keywords.groups.items():
        if any(p in hay for p in phrases):
            hit.add(name)
    return hit


@dataclass(frozen=True)
class FilterResult:
    retained: list[Paragraph]
    matched_groups: list[set[str]]  # parallel to retained
    total: int

    @property
    def retention_ratio(self) -> float:
        return len(self.retained) / self.total if self.total else 0.0

    @property
    def flagged_empty(self) -> bool:
        """True when a non-empty document retained nothing climate-relevant."""
        return self.total > 0 and not self.retained


def filter_corpus(paras: list[Paragraph],
                  keywords: KeywordSet | None = None) -> FilterResult:
    """Order-preserving climate-relevant subsequence of one document."""
    keywords = keywords or KeywordSet()
    retained, groups = [], []
    for p in paras:
        hit = matches(p, keywords)
        if hit:
            retained.append(p)
            groups.append(hit)
    return FilterResult(retained=retained, matched_groups=groups, total=len(paras))
