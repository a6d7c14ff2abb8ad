"""Document loading and paragraph segmentation."""

from .documents import DOC_KINDS, DocumentRef, extract_text, load_manifest
from .pdftext import extract_pdf_text
from .segment import DEFAULT_MIN_CHARS, Paragraph, join_paragraphs, segment_paragraphs

__all__ = [
    "DOC_KINDS",
    "DocumentRef",
    "extract_text",
    "load_manifest",
    "extract_pdf_text",
    "DEFAULT_MIN_CHARS",
    "Paragraph",
    "join_paragraphs",
    "segment_paragraphs",
]
