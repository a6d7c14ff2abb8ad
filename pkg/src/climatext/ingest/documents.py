"""Document references, manifest loading, and text extraction."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from ..errors import EmptyDocument, SchemaMismatch, UnreadableFile, UnsupportedFormat
from .pdftext import extract_pdf_text

DOC_KINDS = ("sustainability_report", "annual_report", "other")

MANIFEST_COLUMNS = ["firm_id", "path", "doc_year", "kind"]


@dataclass(frozen=True)
class DocumentRef:
    """One source document for one firm."""

    firm_id: str
    path: Path
    doc_year: int
    kind: str = "sustainability_report"

    def __post_init__(self):
        if not self.firm_id:
            raise ValueError("firm_id must be non-empty")
        if not 2000 <= self.doc_year <= 2100:
            raise ValueError(f"doc_year {self.doc_year} outside [2000, 2100]")
        if self.kind not in DOC_KINDS:
            raise ValueError(f"kind must be one of {DOC_KINDS}, got {self.kind!r}")


def load_manifest(csv_path: Path | str) -> list[DocumentRef]:
    """Read the manifest CSV mapping firm_id -> document path/year/kind.

    Relative document paths are resolved against the manifest's directory.
    """
    csv_path = Path(csv_path)
    try:
        text = csv_path.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise UnreadableFile(f"cannot read manifest {csv_path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != MANIFEST_COLUMNS:
        raise SchemaMismatch(
            f"manifest header must be {MANIFEST_COLUMNS}, got {reader.fieldnames}")
    docs = []
    base = csv_path.parent
    for i, row in enumerate(reader, start=2):
        path = Path(row["path"])
        if not path.is_absolute():
            path = base / path
        try:
            docs.append(DocumentRef(firm_id=row["firm_id"].strip(), path=path,
                                    doc_year=int(row["doc_year"]), kind=row["kind"].strip()))
        except ValueError as exc:
            raise SchemaMismatch(f"manifest line {i}: {exc}") from exc
    return docs


def extract_text(doc: DocumentRef) -> str:
    """Extract unicode text from a document.

    Plain text passes through byte-faithfully modulo UTF-8 normalization
    (undecodable bytes become U+FFFD: scanned reports are noisy and one
    bad glyph must not kill a batch). PDFs go through the built-in
    extractor, reading order preserved per page.
    """
    path = Path(doc.path)
    if not path.is_file():
        raise UnreadableFile(f"{path} does not exist or is not a file")
    suffix = path.suffix.lower()
    if suffix not in (".pdf", ".txt"):
        raise UnsupportedFormat(f"unsupported document format {suffix!r} ({path})")
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc

    if suffix == ".pdf":
        try:
            text = extract_pdf_text(raw)
        except Exception as exc:
            raise UnsupportedFormat(f"cannot parse PDF {path}: {exc}") from exc
    else:
        text = raw.decode("utf-8", errors="replace")

    if not text.strip():
        raise EmptyDocument(f"no extractable text in {path}")
    return text
