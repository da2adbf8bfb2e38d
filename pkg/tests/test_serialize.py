import random
import struct

import numpy as np
import pytest

from oracles import random_case
from wmscan import serialize
from wmscan.core import PatternSet, preprocess, scan
from wmscan.errors import TableFormatError


@pytest.fixture
def tables():
    return preprocess(PatternSet.from_bytes([b"lover", b"cover", b"rover-long"]))


def test_header_layout(tables):
    blob = serialize.dumps(tables)
    assert blob[:4] == b"WMTB"
    assert struct.unpack_from("<III", blob, 4) == (1, 5, 2)
    assert blob[16:16 + 65536] == tables.shift.tobytes()
    (vec_len,) = struct.unpack_from("<I", blob, 16 + 65536)
    assert vec_len == 8192
    off = 16 + 65536 + 4 + vec_len
    (groups,) = struct.unpack_from("<I", blob, off)
    assert groups == 1
    assert struct.unpack_from("<HIIII", blob, off + 4) == (0x6572, 3, 0, 1, 2)
    off += 4 + 2 + 4 + 12
    assert struct.unpack_from("<III", blob, off) == (3, 0, 5)
    assert blob[off + 12:off + 17] == b"lover"
    assert blob[-16:-12] == b"BLMC"


def test_round_trip(tables):
    back = serialize.loads(serialize.dumps(tables))
    assert back.window == tables.window
    assert np.array_equal(back.shift, tables.shift)
    assert back.groups == tables.groups
    assert np.array_equal(back.bloom.vector, tables.bloom.vector)
    assert [(p.id, p.bytes) for p in back.patterns] == [(p.id, p.bytes) for p in tables.patterns]


def test_round_trip_lossy_bloom():
    t = preprocess(PatternSet.from_bytes([b"abcd", b"bcde"]), bloom_bits=10,
                   bloom_hashes=3, bloom_seed=1234)
    back = serialize.loads(serialize.dumps(t))
    assert (back.bloom.bits, back.bloom.hash_count, back.bloom.seed, back.bloom.mixing) == \
        (10, 3, 1234, "multiplicative")
    assert np.array_equal(back.bloom.gate_table(), t.bloom.gate_table())


def test_without_trailer_defaults_to_identity(tables):
    blob = serialize.dumps(tables)[:-16]
    assert serialize.loads(blob).bloom.mixing == "identity"


@pytest.mark.parametrize("seed", range(10))
def test_scan_through_file_equals_in_memory(tmp_path, seed):
    rng = random.Random(seed)
    pats, text = random_case(rng, max_text=4096)
    t = preprocess(PatternSet(pats))
    path = tmp_path / "t.wmtb"
    serialize.save(t, path)
    back = serialize.load(path)
    for mode in ("all", "skip"):
        assert scan(back, text, mode) == scan(t, text, mode)


@pytest.mark.parametrize("mutate", [
    lambda b: b"XXXX" + b[4:],
    lambda b: b[:4] + struct.pack("<I", 9) + b[8:],
    lambda b: b[:100],
    lambda b: b + b"junk",
])
def test_corrupt_files_rejected(tables, mutate):
    with pytest.raises(TableFormatError):
        serialize.loads(mutate(serialize.dumps(tables)))
