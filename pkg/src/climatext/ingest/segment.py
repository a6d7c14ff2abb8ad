"""Paragraph segmentation.

Paragraph boundary = one or more blank lines (the PDF extractor inserts
blank lines between layout blocks, and plain-text reports conventionally
separate paragraphs the same way). Internal whitespace runs collapse to
single spaces; fragments shorter than ``min_chars`` (headers, footers,
page numbers) are dropped so they do not pollute downstream ratios.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

DEFAULT_MIN_CHARS = 20

_BLANK_LINE_RE = re.compile(r"\n[ \t\r\f\v]*\n\s*")
_WS_RUN_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Paragraph:
    """A text unit with document provenance."""

    firm_id: str
    seq: int
    text: str

    def __post_init__(self):
        if self.seq < 0:
            raise ValueError("seq must be non-negative")
        if not self.text or self.text != self.text.strip():
            raise ValueError("text must be non-empty and stripped")

    @property
    def char_len(self) -> int:
        return len(self.text)


def segment_paragraphs(text: str, firm_id: str = "",
                       min_chars: int = DEFAULT_MIN_CHARS) -> list[Paragraph]:
    """Split raw document text into Paragraphs with dense 0-based seq."""
    if min_chars < 1:
        raise ValueError("min_chars must be >= 1")
    paras = []
    for block in _BLANK_LINE_RE.split(text):
        collapsed = _WS_RUN_RE.sub(" ", block).strip()
        if len(collapsed) >= min_chars:
            paras.append(collapsed)
    return [Paragraph(firm_id=firm_id, seq=i, text=t) for i, t in enumerate(paras)]


def join_paragraphs(paras: list[Paragraph]) -> str:
    """Inverse-ish of segmentation: blank-line-joined paragraph text."""
    return "\n\n".join(p.text for p in paras)
