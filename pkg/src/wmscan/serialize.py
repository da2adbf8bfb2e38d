"""WMTB binary container for built matcher tables.

Layout (little-endian)::

    "WMTB"  version:u32  m:u32  B:u32
    shift[65536]:u8
    bloom_len:u32  bloom[bloom_len]:u8
    group_count:u32  { key:u16  member_count:u32  member_id:u32 * member_count }
    pattern_count:u32  { id:u32  length:u32  bytes[length] }
    optional trailer: "BLMC"  hash_count:u32  seed:u32  mixing:u32

The trailer carries the Bloom probe configuration, which the base layout has
no room for. Readers that stop after the pattern section ignore it; without
it the default single identity probe is assumed.
"""

import struct

import numpy as np

from .bloom import IDENTITY, MULTIPLICATIVE, BloomVector
from .core import BLOCK, NUM_KEYS, MatcherTables, Pattern, PatternSet
from .errors import TableFormatError

MAGIC = b"WMTB"
TRAILER_MAGIC = b"BLMC"
VERSION = 1
_MIXING_CODES = {IDENTITY: 0, MULTIPLICATIVE: 1}


def dumps(tables: MatcherTables) -> bytes:
    out = [MAGIC, struct.pack("<III", VERSION, tables.window, tables.block)]
    out.append(np.asarray(tables.shift, dtype=np.uint8).tobytes())
    vec = tables.bloom.to_bytes()
    out.append(struct.pack("<I", len(vec)))
    out.append(vec)
    out.append(struct.pack("<I", len(tables.groups)))
    for key in sorted(tables.groups):
        members = tables.groups[key]
        out.append(struct.pack("<HI", key, len(members)))
        out.append(struct.pack(f"<{len(members)}I", *members))
    pats = tables.patterns.patterns
    out.append(struct.pack("<I", len(pats)))
    for p in pats:
        out.append(struct.pack("<II", p.id, len(p.bytes)))
        out.append(p.bytes)
    bf = tables.bloom
    out.append(TRAILER_MAGIC)
    out.append(struct.pack("<III", bf.hash_count, bf.seed, _MIXING_CODES[bf.mixing]))
    return b"".join(out)


class _Reader:
    def __init__(self, data):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise TableFormatError(f"truncated table file at offset {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt):
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))

    @property
    def remaining(self):
        return len(self.data) - self.pos


def loads(data: bytes, names=None) -> MatcherTables:
    """Parse a WMTB container. ``names`` optionally maps pattern id -> name."""
    r = _Reader(data)
    if bytes(r.take(4)) != MAGIC:
        raise TableFormatError("bad magic, not a WMTB file")
    version, m, block = r.unpack("<III")
    if version != VERSION:
        raise TableFormatError(f"unsupported WMTB version {version}")
    if block != BLOCK:
        raise TableFormatError(f"unsupported block size {block}")
    shift = np.frombuffer(bytes(r.take(NUM_KEYS)), dtype=np.uint8).copy()
    (vec_len,) = r.unpack("<I")
    vec = np.frombuffer(bytes(r.take(vec_len)), dtype=np.uint8).copy()
    (group_count,) = r.unpack("<I")
    groups = {}
    for _ in range(group_count):
        key, count = r.unpack("<HI")
        groups[key] = tuple(r.unpack(f"<{count}I"))
    (pattern_count,) = r.unpack("<I")
    names = names or {}
    pats = []
    for _ in range(pattern_count):
        pid, length = r.unpack("<II")
        pats.append(Pattern(pid, bytes(r.take(length)), names.get(pid)))

    hash_count, seed, mixing = 1, 0, IDENTITY
    if r.remaining:
        if bytes(r.take(4)) != TRAILER_MAGIC:
            raise TableFormatError("unexpected trailing data")
        hash_count, seed, code = r.unpack("<III")
        mixing = {v: k for k, v in _MIXING_CODES.items()}.get(code)
        if mixing is None:
            raise TableFormatError(f"unknown bloom mixing code {code}")
        if r.remaining:
            raise TableFormatError("unexpected trailing data")
    bits = (vec_len * 8).bit_length() - 1
    if vec_len == 0 or 1 << bits != vec_len * 8:
        raise TableFormatError(f"bloom vector length {vec_len} is not a power of two in bits")

    try:
        pset = PatternSet(pats)
        bloom = BloomVector(bits=bits, hash_count=hash_count, seed=seed,
                            mixing=mixing, vector=vec)
    except ValueError as exc:
        raise TableFormatError(str(exc)) from exc
    if pset.window != m:
        raise TableFormatError(f"stored window {m} disagrees with patterns ({pset.window})")
    for members in groups.values():
        for pid in members:
            if pid not in pset.by_id:
                raise TableFormatError(f"group references unknown pattern id {pid}")
    shift.flags.writeable = False
    return MatcherTables(window=m, shift=shift, groups=groups, bloom=bloom,
                         patterns=pset)


def save(tables, path):
    with open(path, "wb") as fh:
        fh.write(dumps(tables))


def load(path, names=None):
    with open(path, "rb") as fh:
        return loads(fh.read(), names)
