"""Paragraph-level label spaces for the four classification axes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

# Declared label order per axis. Argmax ties resolve to the first label
# in this order, so the order is part of the contract.
AXES: dict[str, tuple[str, ...]] = {
    "sentiment": ("risk", "neutral", "opportunity"),
    "commitment": ("commitment", "no_commitment"),
    "specificity": ("specific", "general"),
    "target": ("netzero", "reduction", "no_target"),
}

AXIS_NAMES = tuple(AXES)

_SCORE_TOL = 1e-6


@dataclass(frozen=True)
class ParagraphLabels:
    """The four per-paragraph verdicts plus per-axis probability vectors."""

    sentiment: str
    commitment: str
    specificity: str
    target: str
    scores: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for axis, labels in AXES.items():
            value = getattr(self, axis)
            if value not in labels:
                raise ValueError(f"{axis}={value!r} not in {labels}")
        for axis, vec in self.scores.items():
            labels = AXES[axis]
            if len(vec) != len(labels):
                raise ValueError(f"{axis} score vector has {len(vec)} entries, "
                                 f"expected {len(labels)}")
            if abs(sum(vec) - 1.0) > _SCORE_TOL:
                raise ValueError(f"{axis} scores sum to {sum(vec)}, not 1")
            # first-maximum tie break must agree with the stored label
            best = max(range(len(vec)), key=lambda i: (vec[i], -i))
            if labels[best] != getattr(self, axis):
                raise ValueError(f"{axis} argmax {labels[best]!r} disagrees with "
                                 f"stored label {getattr(self, axis)!r}")

    def label(self, axis: str) -> str:
        return getattr(self, axis)


def one_hot(axis: str, label: str) -> tuple[float, ...]:
    labels = AXES[axis]
    return tuple(1.0 if lab == label else 0.0 for lab in labels)


def from_scores(scores: dict[str, tuple[float, ...]]) -> ParagraphLabels:
    """Build labels by first-maximum argmax over each axis's score vector.

    Exact ties resolve to the earliest label in the declared order and
    are logged (they should be vanishingly rare with real model scores).
    """
    chosen = {}
    for axis, labels in AXES.items():
        vec = scores[axis]
        best = max(range(len(vec)), key=lambda i: (vec[i], -i))
        if sum(1 for v in vec if v == vec[best]) > 1:
            log.info("argmax tie on %s scores %s; choosing %r",
                     axis, vec, labels[best])
        chosen[axis] = labels[best]
    return ParagraphLabels(scores=dict(scores), **chosen)
