"""Wu-Manber table construction and scanning over byte strings.

Tables are keyed by byte-pairs (block size 2). The 16-bit key of a pair is
``first << 8 | second``, which is also the shift-table address.
"""

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import kernel as _kernel
from .bloom import BloomVector, block_key
from .errors import CapacityExceeded, EmptyPatternSet, InputError, PatternTooShort

BLOCK = 2
NUM_KEYS = 1 << 16
# shift values are stored as bytes, so m - B + 1 must stay <= 255
MAX_WINDOW = 256


class ScanMode(str, enum.Enum):
    ALL = "all"
    SKIP = "skip"


@dataclass(frozen=True)
class Pattern:
    id: int
    bytes: bytes
    name: Optional[str] = None

    def __post_init__(self):
        if self.id < 0:
            raise InputError(f"pattern id must be >= 0, got {self.id}")
        if not self.bytes:
            raise PatternTooShort(self.id, 0, BLOCK)
        object.__setattr__(self, "bytes", bytes(self.bytes))

    def __len__(self):
        return len(self.bytes)

    @property
    def label(self):
        return self.name if self.name is not None else str(self.id)


def compute_window(patterns: Sequence[Pattern]) -> int:
    if not patterns:
        raise EmptyPatternSet("pattern set is empty")
    for p in patterns:
        if len(p.bytes) < BLOCK:
            raise PatternTooShort(p.id, len(p.bytes), BLOCK)
    return min(len(p.bytes) for p in patterns)


class PatternSet:
    """Ordered, id-unique collection of patterns with its matching window."""

    def __init__(self, patterns):
        self.patterns = tuple(patterns)
        self.window = compute_window(self.patterns)
        self.by_id = {}
        for p in self.patterns:
            if p.id in self.by_id:
                raise InputError(f"duplicate pattern id {p.id}")
            self.by_id[p.id] = p

    @classmethod
    def from_bytes(cls, items, names=None):
        names = names or [None] * len(items)
        return cls(Pattern(i, b, n) for i, (b, n) in enumerate(zip(items, names)))

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __getitem__(self, pattern_id):
        return self.by_id[pattern_id]

    def __repr__(self):
        return f"PatternSet(k={len(self.patterns)}, window={self.window})"


class MatchEvent(NamedTuple):
    pattern_id: int
    start: int
    end: int


@dataclass(eq=False)
class MatcherTables:
    window: int
    shift: np.ndarray
    groups: dict
    bloom: BloomVector
    patterns: PatternSet
    block: int = BLOCK
    _prepared: dict = field(default_factory=dict, repr=False)

    @property
    def max_shift(self):
        return self.window - self.block + 1

    @cached_property
    def _layout(self):
        """Flat arrays consumed by the scan kernels (pattern index order)."""
        pats = self.patterns.patterns
        index_of = {p.id: i for i, p in enumerate(pats)}
        counts = np.zeros(NUM_KEYS, dtype=np.uint32)
        members = []
        for key in sorted(self.groups):
            counts[key] = len(self.groups[key])
            members.extend(index_of[pid] for pid in self.groups[key])
        group_start = np.zeros(NUM_KEYS + 1, dtype=np.uint32)
        np.cumsum(counts, out=group_start[1:])
        lengths = np.array([len(p.bytes) for p in pats], dtype=np.uint32)
        offsets = np.zeros(len(pats), dtype=np.uint32)
        if len(pats) > 1:
            np.cumsum(lengths[:-1], out=offsets[1:])
        return dict(
            shift=np.ascontiguousarray(self.shift, dtype=np.uint8),
            group_start=group_start,
            members=np.array(members, dtype=np.uint32),
            pat_data=b"".join(p.bytes for p in pats),
            pat_offset=offsets,
            pat_len=lengths,
            ids=[p.id for p in pats],
        )

    def prepared(self, kernel_name=None, gating=True):
        k = _kernel.get(kernel_name)
        cache_key = (k.NAME, gating)
        if cache_key not in self._prepared:
            lay = self._layout
            gate = self.bloom.gate_table() if gating else np.ones(NUM_KEYS, dtype=np.uint8)
            self._prepared[cache_key] = k.Prepared(
                lay["shift"], gate, lay["group_start"], lay["members"],
                lay["pat_data"], lay["pat_offset"], lay["pat_len"],
            )
        return k, self._prepared[cache_key]


def shift_for_block(tables: MatcherTables, block) -> int:
    return int(tables.shift[block_key(block)])


def preprocess(patterns, bloom_bits=16, bloom_hashes=1, bloom_seed=0,
               bloom_mixing=None) -> MatcherTables:
    """Build shift table, suffix groups and Bloom vector for ``patterns``.

    ``patterns`` may be a :class:`PatternSet` or any sequence of
    :class:`Pattern`. Each pattern contributes only its first ``m`` bytes to
    the tables; longer patterns are still verified in full during scans.
    """
    pset = patterns if isinstance(patterns, PatternSet) else PatternSet(patterns)
    m = pset.window
    if m > MAX_WINDOW:
        raise CapacityExceeded(
            f"window {m} exceeds {MAX_WINDOW}; shift values would not fit in a byte"
        )
    absent = m - BLOCK + 1
    shift = np.full(NUM_KEYS, absent, dtype=np.uint8)
    bloom = BloomVector(bits=bloom_bits, hash_count=bloom_hashes,
                        seed=bloom_seed, mixing=bloom_mixing)
    groups = {}
    for p in pset:
        prefix = p.bytes[:m]
        # pair ending at 1-based position q has shift m - q
        for end in range(BLOCK, m + 1):
            key = (prefix[end - 2] << 8) | prefix[end - 1]
            s = m - end
            if s < shift[key]:
                shift[key] = s
            bloom.insert(key.to_bytes(2, "big"))
        suffix = (prefix[m - 2] << 8) | prefix[m - 1]
        groups.setdefault(suffix, []).append(p.id)
    groups = {k: tuple(sorted(v)) for k, v in groups.items()}
    shift.flags.writeable = False
    return MatcherTables(window=m, shift=shift, groups=groups, bloom=bloom,
                         patterns=pset)


def _mode(mode):
    return ScanMode(mode.value if isinstance(mode, ScanMode) else mode)


def scan_with_stats(tables, text, mode=ScanMode.ALL, gating=True, kernel=None,
                    record=None):
    """Like :func:`scan` but also returns the kernel's step counters.

    Counters are ``(steps, st_reads, zero_shifts, candidates, pb_words,
    matches)``. Pass a list as ``record`` to collect each window start.
    """
    k, prep = tables.prepared(kernel, gating)
    skip = _mode(mode) is ScanMode.SKIP
    hits, counters = k.run(prep, bytes(text), tables.window, skip, record)
    ids = tables._layout["ids"]
    lens = tables._layout["pat_len"]
    events = [MatchEvent(ids[idx], start, start + int(lens[idx])) for start, idx in hits]
    return events, counters


def scan(tables: MatcherTables, text, mode=ScanMode.ALL, gating=True,
         kernel=None):
    """Return match events for ``text``, ordered by start then pattern id.

    ``mode="all"`` advances one byte after every verification and reports
    every occurrence. ``mode="skip"`` advances past the longest pattern that
    verified, so overlapping occurrences may be missed.
    """
    return scan_with_stats(tables, text, mode, gating, kernel)[0]


def verify_at(tables: MatcherTables, text, window_start: int):
    m = tables.window
    if window_start < 0 or window_start + m > len(text):
        raise ValueError("window does not fit inside text")
    key = (text[window_start + m - 2] << 8) | text[window_start + m - 1]
    found = []
    for pid in tables.groups.get(key, ()):
        body = tables.patterns[pid].bytes
        if text[window_start:window_start + len(body)] == body:
            found.append(pid)
    return found
