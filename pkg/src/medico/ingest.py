"""Plain-text extraction from user-uploaded files.

Supported formats: TXT, DOCX, PDF, MARKDOWN. Extraction is text-layer only
(no OCR). The DOCX and PDF readers are deliberately small: DOCX is a zip of
XML parsed with the stdlib, and the PDF reader decodes Flate content streams
and collects the text-show operators, which covers PDFs with a real text
layer (the kind produced by word processors and report generators).
"""

from __future__ import annotations

import re
import zipfile
import zlib
from base64 import a85decode
from enum import Enum
from io import BytesIO
from xml.etree import ElementTree

from .errors import ExtractionFailure, UnsupportedFormat


class FileFormat(str, Enum):
    TXT = "txt"
    DOCX = "docx"
    PDF = "pdf"
    MARKDOWN = "md"


_EXTENSIONS = {
    ".txt": FileFormat.TXT,
    ".docx": FileFormat.DOCX,
    ".pdf": FileFormat.PDF,
    ".md": FileFormat.MARKDOWN,
    ".markdown": FileFormat.MARKDOWN,
}


def format_for_filename(name: str) -> FileFormat:
    """Map a file name to its format by extension; UnsupportedFormat otherwise."""
    dot = name.rfind(".")
    ext = name[dot:].lower() if dot >= 0 else ""
    try:
        return _EXTENSIONS[ext]
    except KeyError:
        raise UnsupportedFormat(f"unsupported file extension: {name!r}") from None


def ingest_file(data: bytes, fmt: FileFormat) -> str:
    """Extract plain text from file bytes in the given format."""
    if fmt is FileFormat.TXT:
        return data.decode("utf-8", errors="replace")
    if fmt is FileFormat.MARKDOWN:
        return strip_markdown(data.decode("utf-8", errors="replace"))
    if fmt is FileFormat.DOCX:
        return _extract_docx(data)
    if fmt is FileFormat.PDF:
        return _extract_pdf(data)
    raise UnsupportedFormat(f"unsupported format: {fmt}")


# -- markdown ----------------------------------------------------------------

_MD_PATTERNS = [
    (re.compile(r"```.*?```", re.S), " "),            # fenced code blocks
    (re.compile(r"`([^`]*)`"), r"\1"),                # inline code
    (re.compile(r"!\[([^\]]*)\]\([^)]*\)"), r"\1"),   # images -> alt text
    (re.compile(r"\[([^\]]*)\]\([^)]*\)"), r"\1"),    # links -> link text
    (re.compile(r"^#{1,6}\s*", re.M), ""),            # headings
    (re.compile(r"^\s*>\s?", re.M), ""),              # blockquotes
    (re.compile(r"^\s*[-*+]\s+", re.M), ""),          # bullet lists
    (re.compile(r"^\s*\d+\.\s+", re.M), ""),          # numbered lists
    (re.compile(r"(\*\*|__)(.*?)\1", re.S), r"\2"),   # bold
    (re.compile(r"(\*|_)(.*?)\1", re.S), r"\2"),      # italics
    (re.compile(r"^\s*([-*_]\s*){3,}$", re.M), ""),   # horizontal rules
]


def strip_markdown(text: str) -> str:
    """Remove markdown syntax, keeping the readable content."""
    for pattern, repl in _MD_PATTERNS:
        text = pattern.sub(repl, text)
    return text


# -- docx --------------------------------------------------------------------


def _extract_docx(data: bytes) -> str:
    try:
        with zipfile.ZipFile(BytesIO(data)) as zf:
            xml = zf.read("word/document.xml")
        root = ElementTree.fromstring(xml)
    except (zipfile.BadZipFile, KeyError, ElementTree.ParseError) as exc:
        raise ExtractionFailure(f"not a readable DOCX file: {exc}") from exc

    paragraphs: list[str] = []
    for para in root.iter():
        if not para.tag.endswith("}p"):
            continue
        runs = [node.text or "" for node in para.iter() if node.tag.endswith("}t")]
        if runs:
            paragraphs.append("".join(runs))
    return "\n".join(paragraphs)


# -- pdf ---------------------------------------------------------------------

_STREAM_RE = re.compile(rb"stream\r?\n(.*?)endstream", re.S)
# A text-showing operator: literal string + Tj/'/" or an array + TJ.
_SHOW_RE = re.compile(rb"\((?:[^()\\]|\\.)*\)\s*(?:Tj|'|\")|\[(?:[^\[\]\\]|\\.)*\]\s*TJ")
_LITERAL_RE = re.compile(rb"\((?:[^()\\]|\\.)*\)")

_PDF_ESCAPES = {
    b"n": b"\n", b"r": b"\r", b"t": b"\t", b"b": b"\b", b"f": b"\f",
    b"(": b"(", b")": b")", b"\\": b"\\",
}


def _decode_pdf_literal(raw: bytes) -> bytes:
    """Decode a PDF literal string body (without the outer parentheses)."""
    out = bytearray()
    i = 0
    while i < len(raw):
        ch = raw[i : i + 1]
        if ch != b"\\":
            out += ch
            i += 1
            continue
        nxt = raw[i + 1 : i + 2]
        if nxt in _PDF_ESCAPES:
            out += _PDF_ESCAPES[nxt]
            i += 2
        elif nxt.isdigit():
            octal = raw[i + 1 : i + 4]
            j = 1
            while j < 3 and raw[i + 1 + j : i + 2 + j].isdigit():
                j += 1
            out.append(int(octal[:j], 8) & 0xFF)
            i += 1 + j
        else:
            i += 1  # line continuation or unknown escape: drop the backslash
    return bytes(out)


def _extract_pdf(data: bytes) -> str:
    if not data.startswith(b"%PDF-"):
        raise ExtractionFailure("missing %PDF header")

    pieces: list[str] = []
    pos = 0
    n_streams = 0
    for match in _STREAM_RE.finditer(data):
        n_streams += 1
        head = data[pos : match.start()].rsplit(b"obj", 1)[-1]
        pos = match.end()
        body = match.group(1)
        try:
            if b"ASCII85Decode" in head:
                body = a85decode(body.strip().removesuffix(b"~>"), ignorechars=b" \t\n\r")
            if b"FlateDecode" in head:
                body = zlib.decompress(body)
        except (ValueError, zlib.error):
            continue  # corrupt or partial stream: skip, keep what we can
        for show in _SHOW_RE.finditer(body):
            for literal in _LITERAL_RE.finditer(show.group(0)):
                decoded = _decode_pdf_literal(literal.group(0)[1:-1])
                if decoded:
                    pieces.append(decoded.decode("latin-1"))
    if n_streams == 0:
        raise ExtractionFailure("no content streams found")
    return " ".join(piece for piece in pieces if piece.strip())
