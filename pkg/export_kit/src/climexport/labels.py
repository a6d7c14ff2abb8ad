"""Canonical label spaces per axis + model-card label normalization.

The downstream pipeline consumes metadata naming each graph's output
order in canonical terms; published checkpoints spell labels differently
(yes/no, net-zero, ...), so normalization happens here, loudly.
"""

from __future__ import annotations

AXES: dict[str, tuple[str, ...]] = {
    "sentiment": ("risk", "neutral", "opportunity"),
    "commitment": ("commitment", "no_commitment"),
    "specificity": ("specific", "general"),
    "target": ("netzero", "reduction", "no_target"),
}

# model-card spelling -> canonical name, per axis
ALIASES: dict[str, dict[str, str]] = {
    "sentiment": {"risk": "risk", "neutral": "neutral",
                  "opportunity": "opportunity"},
    "commitment": {"yes": "commitment", "commitment": "commitment",
                   "true": "commitment",
                   "no": "no_commitment", "none": "no_commitment",
                   "false": "no_commitment", "no_commitment": "no_commitment",
                   "no commitment": "no_commitment"},
    "specificity": {"specific": "specific",
                    "not specific": "general", "not_specific": "general",
                    "non-specific": "general", "general": "general"},
    "target": {"netzero": "netzero", "net-zero": "netzero",
               "net zero": "netzero",
               "reduction": "reduction",
               "no_target": "no_target", "no-target": "no_target",
               "no target": "no_target", "none": "no_target"},
}


class LabelMapError(ValueError):
    pass


def canonicalize(axis: str, model_labels: list[str]) -> list[str]:
    """Model-card labels (output order) -> canonical names (same order)."""
    if axis not in AXES:
        raise LabelMapError(f"unknown axis {axis!r} (choose from {sorted(AXES)})")
    table = ALIASES[axis]
    canonical = []
    for label in model_labels:
        norm = table.get(str(label).strip().lower())
        if norm is None:
            raise LabelMapError(
                f"{axis}: cannot map model label {label!r} onto "
                f"{sorted(set(table.values()))}")
        canonical.append(norm)
    if sorted(canonical) != sorted(AXES[axis]):
        raise LabelMapError(
            f"{axis}: mapped labels {canonical} do not cover {AXES[axis]}")
    return canonical
