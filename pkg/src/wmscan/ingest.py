"""Signature database ingestion and Pattern Buffer word segmentation."""

import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import Pattern, PatternSet
from .errors import EmptyPatternSet, InvalidHexDigit, OddHexLength, TruncatedHeader

HEADER_SIZE = 512
WORD_BYTES = 8

_WILDCARD_CHARS = frozenset("?*{}()|")
_HEX_RE = re.compile(r"[0-9a-fA-F]*")


@dataclass
class CvdHeader:
    raw: bytes
    fields: list
    body: bytes = field(default=b"", repr=False)


def parse_cvd_header(data: bytes) -> CvdHeader:
    """Split the 512-byte ASCII header of a CVD-style container.

    The textual portion ends at the first NUL or at the 512-byte boundary;
    trailing spaces (ClamAV pads with them) are dropped before splitting on
    colons. The remaining bytes are returned untouched as ``body``.
    """
    if len(data) < HEADER_SIZE:
        raise TruncatedHeader(f"header needs {HEADER_SIZE} bytes, got {len(data)}")
    raw = bytes(data[:HEADER_SIZE])
    text = raw.split(b"\0", 1)[0].decode("latin-1").rstrip(" \r\n")
    return CvdHeader(raw=raw, fields=text.split(":"), body=bytes(data[HEADER_SIZE:]))


def decode_hex(text, line_number):
    if not _HEX_RE.fullmatch(text):
        bad = next(c for c in text if c not in "0123456789abcdefABCDEF")
        raise InvalidHexDigit(line_number, f"invalid hex digit {bad!r}")
    if len(text) % 2:
        raise OddHexLength(line_number, f"odd hex length {len(text)}")
    return bytes.fromhex(text)


class HexSignature(NamedTuple):
    name: str
    hex: str
    bytes: bytes


@dataclass
class SkipReport:
    wildcard: list = field(default_factory=list)  # line numbers
    blank: int = 0
    comment: int = 0

    @property
    def skipped(self):
        return len(self.wildcard)


def parse_hex_line(line, line_number):
    """Return a :class:`HexSignature`, or None if the hex body has wildcards."""
    fields = line.split(":")
    if len(fields) >= 4:
        name, hexsig = fields[0], fields[3]
    else:
        name, hexsig = str(line_number), line
    hexsig = hexsig.strip()
    if _WILDCARD_CHARS.intersection(hexsig):
        return None
    return HexSignature(name, hexsig, decode_hex(hexsig, line_number))


def load_hex_signatures(lines):
    """Load hex signatures into a PatternSet.

    Returns ``(pattern_set, skip_report)``. Line numbers in errors and in the
    report are 1-based. Unnamed signatures are named by their line number.
    """
    patterns = []
    report = SkipReport()
    for number, line in enumerate(lines, 1):
        line = line.rstrip("\r\n").strip()
        if not line:
            report.blank += 1
            continue
        if line.startswith("#"):
            report.comment += 1
            continue
        sig = parse_hex_line(line, number)
        if sig is None:
            report.wildcard.append(number)
            continue
        patterns.append(Pattern(len(patterns), sig.bytes, sig.name))
    if not patterns:
        raise EmptyPatternSet("no signatures loaded")
    return PatternSet(patterns), report


def load_signature_file(path, fmt="hex"):
    """Read a signature file. ``fmt`` is ``hex`` or ``cvd-header``.

    For ``cvd-header`` the first 512 bytes are parsed as a header and the
    rest must already be an extracted hex-lines body.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    header = None
    if fmt == "cvd-header":
        header = parse_cvd_header(data)
        data = header.body
    elif fmt != "hex":
        raise ValueError(f"unknown signature format {fmt!r}")
    pset, report = load_hex_signatures(data.decode("utf-8").splitlines())
    return pset, report, header


class PbWord(NamedTuple):
    payload: bytes
    last: bool


def segment_pattern(pattern):
    """Split a pattern (or raw bytes) into 8-byte words, zero-padding the tail."""
    body = pattern.bytes if isinstance(pattern, Pattern) else bytes(pattern)
    if not body:
        raise ValueError("cannot segment an empty pattern")
    count = -(-len(body) // WORD_BYTES)
    padded = body.ljust(count * WORD_BYTES, b"\0")
    return [
        PbWord(padded[i * WORD_BYTES:(i + 1) * WORD_BYTES], i == count - 1)
        for i in range(count)
    ]
