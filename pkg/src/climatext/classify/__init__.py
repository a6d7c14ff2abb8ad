"""Paragraph classification with swappable backends."""

from .backends import (
    BACKEND_KINDS,
    BackendDescriptor,
    FixtureBackend,
    GraphBackend,
    StubBackend,
    classify_batch,
    make_backend,
    stub_classify,
)
from .labels import AXES, AXIS_NAMES, ParagraphLabels, from_scores, one_hot

__all__ = [
    "AXES",
    "AXIS_NAMES",
    "BACKEND_KINDS",
    "BackendDescriptor",
    "FixtureBackend",
    "GraphBackend",
    "ParagraphLabels",
    "StubBackend",
    "classify_batch",
    "from_scores",
    "make_backend",
    "one_hot",
    "stub_classify",
]
