"""Minimal PDF text extraction.

Covers text-based PDFs with classic object layout and Flate/ASCII85
filters (reportlab output and most digitally-produced reports). Pages are
walked in page-tree order; each BT..ET text block becomes its own
paragraph-ish block, and blocks/pages are joined with blank lines so the
downstream segmenter can split on them.

Out of scope (by design): OCR, CID/CMap composite fonts, encrypted files,
table reconstruction. Strings in unsupported encodings decode through
cp1252 with replacement rather than failing.
"""

from __future__ import annotations

import base64
import re
import zlib

_OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")
_NAME_RE = re.compile(rb"/([^\s/\[\]<>()]*)")
_NUM_RE = re.compile(rb"[+-]?(?:\d+\.?\d*|\.\d+)")
_WS = b"\x00\t\n\x0c\r "
_DELIM = b"()<>[]{}/%"

# Literal-string escapes, PDF 32000-1 7.3.4.2.
_ESCAPES = {
    b"n": b"\n", b"r": b"\r", b"t": b"\t", b"b": b"\b", b"f": b"\x0c",
    b"(": b"(", b")": b")", b"\\": b"\\",
}


class _Ref:
    __slots__ = ("num",)

    def __init__(self, num: int):
        self.num = num

    def __repr__(self):
        return f"Ref({self.num})"


class _Lexer:
    """Token-at-a-time reader over a PDF object/content byte stream."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _skip_ws(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos:self.pos + 1]
            if c in _WS:
                self.pos += 1
            elif c == b"%":  # comment to end of line
                while self.pos < n and data[self.pos:self.pos + 1] not in b"\r\n":
                    self.pos += 1
            else:
                break

    def peek(self) -> bytes:
        self._skip_ws()
        return self.data[self.pos:self.pos + 2]

    def read_object(self):
        """Parse one object: dict, array, name, number, string, ref, keyword."""
        self._skip_ws()
        data = self.data
        if self.pos >= len(data):
            return None
        two = data[self.pos:self.pos + 2]
        c = two[:1]
        if two == b"<<":
            return self._read_dict()
        if c == b"<":
            return self._read_hex_string()
        if c == b"(":
            return self._read_literal_string()
        if c == b"[":
            return self._read_array()
        if c == b"/":
            m = _NAME_RE.match(data, self.pos)
            self.pos = m.end()
            return "/" + m.group(1).decode("latin-1")
        m = _NUM_RE.match(data, self.pos)
        if m:
            # lookahead for "num gen R" indirect references
            save = self.pos
            self.pos = m.end()
            tok = m.group(0)
            if b"." not in tok:
                rollback = self.pos
                self._skip_ws()
                m2 = _NUM_RE.match(data, self.pos)
                if m2 and b"." not in m2.group(0):
                    p2 = m2.end()
                    k = p2
                    while k < len(data) and data[k:k + 1] in _WS:
                        k += 1
                    if data[k:k + 1] == b"R":
                        self.pos = k + 1
                        return _Ref(int(tok))
                self.pos = rollback
            _ = save
            return float(tok) if b"." in tok else int(tok)
        # bare keyword (true/false/null/operator)
        start = self.pos
        while self.pos < len(data) and data[self.pos:self.pos + 1] not in _WS + _DELIM:
            self.pos += 1
        if self.pos == start:  # stray delimiter; skip it
            self.pos += 1
            return self.read_object()
        return data[start:self.pos].decode("latin-1")

    def _read_dict(self) -> dict:
        self.pos += 2
        out = {}
        while True:
            self._skip_ws()
            if self.data[self.pos:self.pos + 2] == b">>":
                self.pos += 2
                return out
            key = self.read_object()
            if key is None:
                return out
            val = self.read_object()
            if isinstance(key, str) and key.startswith("/"):
                out[key] = val

    def _read_array(self) -> list:
        self.pos += 1
        out = []
        while True:
            self._skip_ws()
            if self.data[self.pos:self.pos + 1] == b"]":
                self.pos += 1
                return out
            if self.pos >= len(self.data):
                return out
            out.append(self.read_object())

    def _read_literal_string(self) -> bytes:
        data = self.data
        self.pos += 1
        depth = 1
        out = bytearray()
        while self.pos < len(data):
            c = data[self.pos:self.pos + 1]
            if c == b"\\":
                nxt = data[self.pos + 1:self.pos + 2]
                if nxt in _ESCAPES:
                    out += _ESCAPES[nxt]
                    self.pos += 2
                elif nxt.isdigit():  # octal \ddd
                    m = re.match(rb"\\([0-7]{1,3})", data[self.pos:self.pos + 4])
                    out.append(int(m.group(1), 8) & 0xFF)
                    self.pos += 1 + len(m.group(1))
                elif nxt in b"\r\n":  # line continuation
                    self.pos += 2
                    if nxt == b"\r" and data[self.pos:self.pos + 1] == b"\n":
                        self.pos += 1
                else:
                    out += nxt
                    self.pos += 2
            elif c == b"(":
                depth += 1
                out += c
                self.pos += 1
            elif c == b")":
                depth -= 1
                self.pos += 1
                if depth == 0:
                    return bytes(out)
                out += c
            else:
                out += c
                self.pos += 1
        return bytes(out)

    def _read_hex_string(self) -> bytes:
        end = self.data.index(b">", self.pos)
        hexdigits = re.sub(rb"[^0-9A-Fa-f]", b"", self.data[self.pos + 1:end])
        self.pos = end + 1
        if len(hexdigits) % 2:
            hexdigits += b"0"
        return bytes.fromhex(hexdigits.decode("ascii"))


def _apply_filters(data: bytes, filters) -> bytes:
    if filters is None:
        return data
    if not isinstance(filters, list):
        filters = [filters]
    for f in filters:
        if f == "/FlateDecode":
            data = zlib.decompress(data)
        elif f == "/ASCII85Decode":
            data = base64.a85decode(data.strip().rstrip(b"~>") + b"~>", adobe=True)
        elif f == "/ASCIIHexDecode":
            data = bytes.fromhex(re.sub(rb"[^0-9A-Fa-f]", b"",
                                        data.rstrip(b">")).decode("ascii"))
        else:
            raise ValueError(f"unsupported stream filter {f}")
    return data


class PdfDocument:
    """Parsed object table + page walker for a PDF byte string."""

    def __init__(self, raw: bytes):
        if not raw.lstrip()[:5].startswith(b"%PDF-"):
            raise ValueError("not a PDF (missing %PDF header)")
        self.raw = raw
        self.objects: dict[int, tuple] = {}  # num -> (value, stream bytes | None)
        self._scan_objects()
        self._expand_object_streams()

    def _scan_objects(self) -> None:
        raw = self.raw
        for m in _OBJ_RE.finditer(raw):
            num = int(m.group(1))
            lex = _Lexer(raw, m.end())
            try:
                value = lex.read_object()
            except Exception:
                continue
            stream = None
            tail = raw[lex.pos:lex.pos + 20]
            if isinstance(value, dict) and tail.lstrip()[:6] == b"stream":
                start = raw.index(b"stream", lex.pos) + len(b"stream")
                if raw[start:start + 2] == b"\r\n":
                    start += 2
                elif raw[start:start + 1] in (b"\n", b"\r"):
                    start += 1
                length = value.get("/Length")
                if isinstance(length, _Ref):
                    length = self._raw_int(length.num)
                if isinstance(length, (int, float)):
                    end = start + int(length)
                    if raw[end:end + 20].lstrip()[:9] != b"endstream":
                        end = raw.find(b"endstream", start)
                else:
                    end = raw.find(b"endstream", start)
                stream = raw[start:end].rstrip(b"\r\n")
            self.objects[num] = (value, stream)

    def _raw_int(self, num: int):
        """Resolve a /Length stored as its own integer object, pre-table."""
        m = re.search(rb"(?m)^%d\s+\d+\s+obj\s+(\d+)" % num, self.raw)
        return int(m.group(1)) if m else None

    def _expand_object_streams(self) -> None:
        for num, (value, stream) in list(self.objects.items()):
            if not (isinstance(value, dict) and value.get("/Type") == "/ObjStm"
                    and stream is not None):
                continue
            try:
                data = _apply_filters(stream, value.get("/Filter"))
            except Exception:
                continue
            n, first = int(value.get("/N", 0)), int(value.get("/First", 0))
            header = data[:first].split()
            for i in range(n):
                onum, off = int(header[2 * i]), int(header[2 * i + 1])
                lex = _Lexer(data, first + off)
                try:
                    self.objects.setdefault(onum, (lex.read_object(), None))
                except Exception:
                    pass

    def resolve(self, value):
        seen = set()
        while isinstance(value, _Ref):
            if value.num in seen or value.num not in self.objects:
                return None
            seen.add(value.num)
            value = self.objects[value.num][0]
        return value

    def _page_refs(self) -> list[int]:
        """Page object numbers in document order via the page tree."""
        root_pages = None
        for value, _ in self.objects.values():
            if isinstance(value, dict) and value.get("/Type") == "/Catalog":
                pages = value.get("/Pages")
                if isinstance(pages, _Ref):
                    root_pages = pages.num
                break
        ordered: list[int] = []

        def walk(num: int, seen: set[int]) -> None:
            if num in seen or num not in self.objects:
                return
            seen.add(num)
            node = self.objects[num][0]
            if not isinstance(node, dict):
                return
            if node.get("/Type") == "/Page":
                ordered.append(num)
                return
            for kid in self.resolve(node.get("/Kids")) or []:
                if isinstance(kid, _Ref):
                    walk(kid.num, seen)

        if root_pages is not None:
            walk(root_pages, set())
        if not ordered:  # damaged tree: fall back to object-number order
            ordered = sorted(n for n, (v, _) in self.objects.items()
                             if isinstance(v, dict) and v.get("/Type") == "/Page")
        return ordered

    def _content_bytes(self, page: dict) -> bytes:
        contents = page.get("/Contents")
        refs = contents if isinstance(contents, list) else [contents]
        chunks = []
        for ref in refs:
            num = ref.num if isinstance(ref, _Ref) else None
            if num is None or num not in self.objects:
                continue
            value, stream = self.objects[num]
            if stream is None:
                continue
            try:
                chunks.append(_apply_filters(stream, self.resolve(value.get("/Filter"))))
            except Exception:
                continue
        return b"\n".join(chunks)

    def page_texts(self) -> list[str]:
        return [_content_to_text(self._content_bytes(self.objects[num][0]))
                for num in self._page_refs()]


def _decode_pdf_string(raw: bytes) -> str:
    if raw[:2] in (b"\xfe\xff", b"\xff\xfe"):
        return raw.decode("utf-16", errors="replace")
    return raw.decode("cp1252", errors="replace")


def _content_to_text(content: bytes) -> str:
    """Replay the text operators of one page's content stream.

    Each BT..ET block becomes a text block; blocks are joined with blank
    lines. Inside a block, Td/TD/T*/Tm moves that change the baseline
    start a new line; Tj/TJ/quote operators append glyph strings.
    """
    lex = _Lexer(content)
    blocks: list[str] = []
    stack: list = []
    in_text = False
    lines: list[str] = []
    cur: list[str] = []
    ty = None  # current baseline y within the text object

    def flush_line():
        nonlocal cur
        if cur:
            lines.append("".join(cur))
            cur = []

    def flush_block():
        nonlocal lines
        flush_line()
        text = "\n".join(ln for ln in lines if ln.strip())
        if text.strip():
            blocks.append(text)
        lines = []

    while True:
        try:
            tok = lex.read_object()
        except Exception:
            break
        if tok is None:
            break
        if isinstance(tok, str) and not tok.startswith("/"):
            op = tok
            if op == "BT":
                in_text, ty = True, None
            elif op == "ET":
                flush_block()
                in_text = False
            elif in_text and op in ("Td", "TD"):
                if len(stack) >= 2 and isinstance(stack[-1], (int, float)):
                    dy = stack[-1]
                    if dy != 0:
                        flush_line()
                        ty = (ty or 0) - dy
            elif in_text and op == "Tm":
                if len(stack) >= 6 and isinstance(stack[-1], (int, float)):
                    new_ty = stack[-1]
                    if ty is not None and new_ty != ty:
                        flush_line()
                    ty = new_ty
            elif in_text and op == "T*":
                flush_line()
            elif in_text and op == "Tj" and stack and isinstance(stack[-1], bytes):
                cur.append(_decode_pdf_string(stack[-1]))
            elif in_text and op in ("'", '"') and stack and isinstance(stack[-1], bytes):
                flush_line()
                cur.append(_decode_pdf_string(stack[-1]))
            elif in_text and op == "TJ" and stack and isinstance(stack[-1], list):
                parts = []
                for item in stack[-1]:
                    if isinstance(item, bytes):
                        parts.append(_decode_pdf_string(item))
                    elif isinstance(item, (int, float)) and item < -150:
                        parts.append(" ")  # large kern gap reads as a space
                cur.append("".join(parts))
            stack = []
        else:
            stack.append(tok)
    if in_text:
        flush_block()
    return "\n\n".join(blocks)


def extract_pdf_text(raw: bytes) -> str:
    """Extract text from PDF bytes, pages in order, blank lines between
    layout blocks and pages. Returns "" when no text operators are found."""
    doc = PdfDocument(raw)
    pages = [t for t in doc.page_texts() if t.strip()]
    return "\n\n".join(pages)
