"""Byte-pair Bloom filter used to gate shift-table reads.

The default configuration (2**16 bits, one probe, identity mixing) maps every
byte-pair to its own bit, so the filter is an exact presence bitmap. Smaller
vectors or extra probes switch to a multiplicative mixing hash and become
lossy in the usual Bloom-filter way (false positives, never false negatives).
"""

from dataclasses import dataclass, field

import numpy as np

IDENTITY = "identity"
MULTIPLICATIVE = "multiplicative"

MIN_BITS = 3
MAX_BITS = 24
MAX_HASHES = 4

_MASK32 = 0xFFFFFFFF


def block_key(block):
    """Return the 16-bit key of a byte-pair, earlier byte in the high half."""
    if len(block) != 2:
        raise ValueError(f"block must be exactly 2 bytes, got {len(block)}")
    return (block[0] << 8) | block[1]


def _mix(key, probe_index, seed, bits):
    x = ((key | (probe_index << 16)) ^ seed) & _MASK32
    x = (x * 0x9E3779B1) & _MASK32
    x ^= x >> 15
    x = (x * 0x85EBCA6B) & _MASK32
    x ^= x >> 13
    return x >> (32 - bits)


def bf_hash(block, probe_index=0, seed=0, bits=16, mixing=IDENTITY):
    """Bit index for ``block`` under probe ``probe_index``.

    ``block`` is a 2-byte string or an already-computed 16-bit key. Identity
    mixing is only defined for ``bits == 16`` and only for probe 0; further
    probes always use the multiplicative mix so that they differ from probe 0.
    """
    key = block if isinstance(block, int) else block_key(block)
    if mixing == IDENTITY and probe_index == 0:
        if bits != 16:
            raise ValueError("identity mixing requires a 2**16-bit vector")
        return key
    return _mix(key, probe_index, seed, bits)


@dataclass
class BloomVector:
    bits: int = 16
    hash_count: int = 1
    seed: int = 0
    mixing: str = None
    vector: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if not MIN_BITS <= self.bits <= MAX_BITS:
            raise ValueError(f"bits must be in [{MIN_BITS}, {MAX_BITS}], got {self.bits}")
        if not 1 <= self.hash_count <= MAX_HASHES:
            raise ValueError(f"hash_count must be in [1, {MAX_HASHES}], got {self.hash_count}")
        if not 0 <= self.seed <= _MASK32:
            raise ValueError("seed must fit in 32 bits")
        if self.mixing is None:
            self.mixing = IDENTITY if self.bits == 16 else MULTIPLICATIVE
        if self.mixing not in (IDENTITY, MULTIPLICATIVE):
            raise ValueError(f"unknown mixing {self.mixing!r}")
        if self.mixing == IDENTITY and self.bits != 16:
            raise ValueError("identity mixing requires bits=16")
        if self.vector is None:
            self.vector = np.zeros(self.size // 8, dtype=np.uint8)
        elif len(self.vector) != self.size // 8:
            raise ValueError(
                f"vector has {len(self.vector)} bytes, expected {self.size // 8}"
            )

    @property
    def size(self):
        return 1 << self.bits

    def positions(self, block):
        return [
            bf_hash(block, i, self.seed, self.bits, self.mixing)
            for i in range(self.hash_count)
        ]

    def insert(self, block):
        for pos in self.positions(block):
            self.vector[pos >> 3] |= 1 << (pos & 7)
        return self

    def query(self, block):
        vec = self.vector
        return all(vec[pos >> 3] >> (pos & 7) & 1 for pos in self.positions(block))

    __contains__ = query

    def gate_table(self):
        """Query result for all 65,536 byte-pairs as a 0/1 uint8 array."""
        keys = np.arange(1 << 16, dtype=np.uint32)
        bitvec = np.unpackbits(self.vector, bitorder="little")
        gate = np.ones(1 << 16, dtype=bool)
        for probe in range(self.hash_count):
            gate &= bitvec[self._positions_array(keys, probe)].astype(bool)
        return gate.astype(np.uint8)

    def _positions_array(self, keys, probe):
        if self.mixing == IDENTITY and probe == 0:
            return keys
        x = ((keys | np.uint32(probe << 16)) ^ np.uint32(self.seed)).astype(np.uint64)
        x = (x * 0x9E3779B1) & _MASK32
        x ^= x >> 15
        x = (x * 0x85EBCA6B) & _MASK32
        x ^= x >> 13
        return (x >> (32 - self.bits)).astype(np.int64)

    def to_bytes(self):
        return self.vector.tobytes()


def bf_insert(bf, block):
    return bf.insert(block)


def bf_query(bf, block):
    return bf.query(block)
