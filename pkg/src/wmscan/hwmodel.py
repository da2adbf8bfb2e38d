"""Memory images of the Pattern Buffer / Hash Table / Shift Table and a
cycle-cost throughput estimate.

Address conventions:

* PB is a sequence of 65-bit words (8 payload bytes + last-word flag). All
  patterns sharing a suffix key sit in one contiguous segment, ordered by
  pattern id; segments are laid out in ascending key order.
* HT has 2 * 65536 32-bit entries. ``ht[0x10000 | key]`` is the first word of
  the key's segment and ``ht[key]`` its last word (inclusive). Keys without a
  segment hold ``0xFFFFFFFF`` in both halves.
* ST is a byte per key, a copy of the shift table.

PB words alone cannot tell a pattern's trailing zero bytes from padding, so
the PB image also keeps a directory mapping each pattern's first word to its
id and byte length.
"""

import json
import struct
from dataclasses import dataclass, fields

import numpy as np

from .core import NUM_KEYS, MatcherTables, ScanMode, MatchEvent, scan_with_stats
from .errors import CapacityExceeded, InputError, ZeroCycles
from .ingest import WORD_BYTES, PbWord, segment_pattern

HT_ENTRIES = 2 * NUM_KEYS
HT_START = NUM_KEYS
SENTINEL = 0xFFFFFFFF
# PM maximum post-PAR frequency; PM is the slowest module
DEFAULT_CLOCK_MHZ = 239.005


@dataclass
class PbImage:
    words: list
    segments: dict
    directory: dict
    address_width: int = 32


@dataclass
class HwImages:
    pb: PbImage
    ht: np.ndarray
    st: np.ndarray
    window: int


def build_images(tables: MatcherTables, max_words=1 << 32) -> HwImages:
    words = []
    segments = {}
    directory = {}
    for key in sorted(tables.groups):
        start = len(words)
        for pid in tables.groups[key]:
            body = tables.patterns[pid].bytes
            directory[len(words)] = (pid, len(body))
            words.extend(segment_pattern(body))
            if len(words) >= max_words:
                raise CapacityExceeded(
                    f"pattern buffer needs more than {max_words - 1} words"
                )
        segments[key] = (start, len(words) - 1)
    ht = np.full(HT_ENTRIES, SENTINEL, dtype=np.uint32)
    for key, (start, end) in segments.items():
        ht[HT_START | key] = start
        ht[key] = end
    st = np.array(tables.shift, dtype=np.uint8)
    return HwImages(PbImage(words, segments, directory), ht, st, tables.window)


def scan_images(images: HwImages, text, mode=ScanMode.SKIP):
    """Reference scanner that reads only the ST, HT and PB images."""
    skip = ScanMode(mode) is ScanMode.SKIP
    text = bytes(text)
    m = images.window
    st, ht = images.st, images.ht
    pb_words = images.pb.words
    directory = images.pb.directory
    events = []
    i = 0
    while i + m <= len(text):
        key = (text[i + m - 2] << 8) | text[i + m - 1]
        s = int(st[key])
        if s:
            i += s
            continue
        addr, end = int(ht[HT_START | key]), int(ht[key])
        longest = 0
        while addr <= end:
            first = addr
            chunks = []
            while True:
                word = pb_words[addr]
                chunks.append(word.payload)
                addr += 1
                if word.last:
                    break
            pid, length = directory[first]
            if text[i:i + length] == b"".join(chunks)[:length]:
                events.append(MatchEvent(pid, i, i + length))
                longest = max(longest, length)
        i += longest if skip and longest else 1
    return events


@dataclass(frozen=True)
class CostModel:
    bf_query: int = 1
    st_read: int = 1
    ht_read: int = 2
    pb_word: int = 1
    verify_commit: int = 1
    advance: int = 1

    @classmethod
    def parse(cls, text):
        """Parse ``key=value`` lines; ``#`` starts a comment."""
        known = {f.name for f in fields(cls)}
        values = {}
        for number, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise InputError(f"cost file line {number}: expected one of {sorted(known)}=N")
            try:
                values[key] = int(value)
            except ValueError:
                raise InputError(f"cost file line {number}: {value.strip()!r} is not an integer") from None
            if values[key] < 0:
                raise InputError(f"cost file line {number}: costs must be >= 0")
        return cls(**values)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())


@dataclass
class CycleReport:
    total_cycles: int = 0
    window_steps: int = 0
    st_reads: int = 0
    ht_reads: int = 0
    verifications: int = 0
    pb_words_read: int = 0
    matches: int = 0
    bytes_processed: int = 0
    clock_mhz: float = DEFAULT_CLOCK_MHZ
    preprocess_cycles: int = 0

    @property
    def bitrate_mbps(self):
        if not self.total_cycles:
            return None
        return 8 * self.bytes_processed * self.clock_mhz / self.total_cycles

    @property
    def cycles_per_byte(self):
        return self.total_cycles / self.bytes_processed if self.bytes_processed else 0.0

    def __add__(self, other):
        summed = {
            f.name: getattr(self, f.name) + getattr(other, f.name)
            for f in fields(self)
            if f.name not in ("clock_mhz", "preprocess_cycles")
        }
        return CycleReport(clock_mhz=self.clock_mhz,
                           preprocess_cycles=self.preprocess_cycles, **summed)


def preprocess_cycles(tables):
    """One cycle per ST write, PB word write and HT entry write."""
    pb = sum(-(-len(p.bytes) // WORD_BYTES) for p in tables.patterns)
    return NUM_KEYS + pb + 2 * len(tables.groups)


def estimate_cycles(tables, text, cost=CostModel(), clock_mhz=DEFAULT_CLOCK_MHZ,
                    gating=True, kernel=None):
    """Cycle count for scanning ``text`` along the skip-mode trajectory."""
    _, counters = scan_with_stats(tables, text, ScanMode.SKIP, gating, kernel)
    steps, st_reads, zero_shifts, candidates, pb_words, matches = counters
    total = (steps * (cost.bf_query + cost.advance)
             + st_reads * cost.st_read
             + zero_shifts * cost.ht_read
             + pb_words * cost.pb_word
             + candidates * cost.verify_commit)
    return CycleReport(
        total_cycles=total, window_steps=steps, st_reads=st_reads,
        ht_reads=zero_shifts, verifications=candidates, pb_words_read=pb_words,
        matches=matches, bytes_processed=len(text), clock_mhz=clock_mhz,
        preprocess_cycles=preprocess_cycles(tables),
    )


def estimate_trace_cycles(tables, frames, cost=CostModel(),
                          clock_mhz=DEFAULT_CLOCK_MHZ, gating=True, kernel=None):
    """Sum of per-frame cycle reports (each frame scanned independently)."""
    total = CycleReport(clock_mhz=clock_mhz, preprocess_cycles=preprocess_cycles(tables))
    for frame in frames:
        total = total + estimate_cycles(tables, frame, cost, clock_mhz, gating, kernel)
    return total


def estimate_bitrate(report, clock_mhz=None):
    if report.total_cycles <= 0:
        raise ZeroCycles("no cycles recorded")
    clock = report.clock_mhz if clock_mhz is None else clock_mhz
    return 8 * report.bytes_processed * clock / report.total_cycles


# -- image dump ---------------------------------------------------------------

def _pb_bytes(pb):
    return b"".join(w.payload + (b"\x01" if w.last else b"\x00") for w in pb.words)


def _directory_bytes(pb):
    return b"".join(
        struct.pack("<III", addr, pid, length)
        for addr, (pid, length) in sorted(pb.directory.items())
    )


def dump_images(images, bin_path, manifest_path):
    """Write images as raw little-endian sections plus a JSON manifest.

    PB words are stored as 9 bytes each: the 8 payload bytes then a flag
    byte (1 on a pattern's last word).
    """
    sections = [
        ("st", images.st.astype(np.uint8).tobytes()),
        ("ht", images.ht.astype("<u4").tobytes()),
        ("pb", _pb_bytes(images.pb)),
        ("pb_directory", _directory_bytes(images.pb)),
    ]
    manifest = {"format": "wmscan-images", "version": 1, "window": images.window,
                "pb_word_count": len(images.pb.words), "sections": []}
    offset = 0
    with open(bin_path, "wb") as fh:
        for name, blob in sections:
            fh.write(blob)
            manifest["sections"].append({"name": name, "offset": offset, "length": len(blob)})
            offset += len(blob)
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def load_images(bin_path, manifest_path):
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    with open(bin_path, "rb") as fh:
        data = fh.read()
    sec = {s["name"]: data[s["offset"]:s["offset"] + s["length"]] for s in manifest["sections"]}
    st = np.frombuffer(sec["st"], dtype=np.uint8).copy()
    ht = np.frombuffer(sec["ht"], dtype="<u4").astype(np.uint32)
    raw = sec["pb"]
    step = WORD_BYTES + 1
    words = [PbWord(raw[i:i + WORD_BYTES], raw[i + WORD_BYTES] == 1)
             for i in range(0, len(raw), step)]
    directory = {}
    for addr, pid, length in struct.iter_unpack("<III", sec["pb_directory"]):
        directory[addr] = (pid, length)
    segments = {key: (int(ht[HT_START | key]), int(ht[key]))
                for key in np.nonzero(ht[:NUM_KEYS] != SENTINEL)[0].tolist()}
    return HwImages(PbImage(words, segments, directory), ht, st, manifest["window"])


def describe_key(tables, images, key):
    """Human-readable ST/HT/PB contents for one byte-pair key."""
    pair = key.to_bytes(2, "big")
    lines = [
        f"key      0x{key:04x} ({pair!r})",
        f"bloom    {int(tables.bloom.query(pair))}",
        f"ST[{key:04x}] {int(images.st[key])}",
    ]
    start, end = int(images.ht[HT_START | key]), int(images.ht[key])
    if start == SENTINEL:
        lines.append(f"HT[1{key:04x}] sentinel  HT[0{key:04x}] sentinel")
        return "\n".join(lines)
    lines.append(f"HT[1{key:04x}] {start}  HT[0{key:04x}] {end}")
    for addr in range(start, end + 1):
        word = images.pb.words[addr]
        note = ""
        if addr in images.pb.directory:
            pid, length = images.pb.directory[addr]
            note = f"  <- pattern {pid} ({tables.patterns[pid].label}, {length} B)"
        lines.append(f"PB[{addr:08x}] {word.payload.hex(' ')} last={int(word.last)}{note}")
    return "\n".join(lines)
