import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_shift_table, naive_matches, random_case
from wmscan.core import (MatchEvent, Pattern, PatternSet, ScanMode, compute_window,
                         preprocess, scan, scan_with_stats, shift_for_block, verify_at)
from wmscan.errors import CapacityExceeded, EmptyPatternSet, InputError, PatternTooShort


def key(pair):
    return (pair[0] << 8) | pair[1]


@pytest.fixture(scope="module")
def lover_cover():
    return preprocess(PatternSet.from_bytes([b"lover", b"cover"]))


# -- compute_window -----------------------------------------------------------

def test_window_rejects_single_byte_pattern():
    with pytest.raises(PatternTooShort) as exc:
        compute_window([Pattern(0, b"abcde"), Pattern(1, b"x")])
    assert exc.value.pattern_id == 1


def test_window_allows_two_byte_pattern():
    assert compute_window([Pattern(0, b"abcde"), Pattern(1, b"xy")]) == 2


def test_window_single_pattern():
    assert compute_window([Pattern(0, b"abcde")]) == 5


def test_window_empty():
    with pytest.raises(EmptyPatternSet):
        compute_window([])


def test_duplicate_ids_rejected():
    with pytest.raises(InputError):
        PatternSet([Pattern(0, b"ab"), Pattern(0, b"cd")])


# -- shift table --------------------------------------------------------------

@pytest.mark.parametrize("pair, expected", [(b"er", 0), (b"ov", 2), (b"zz", 4)])
def test_shift_for_block(lover_cover, pair, expected):
    assert shift_for_block(lover_cover, pair) == expected


def test_preprocess_lover_cover(lover_cover):
    t = lover_cover
    assert t.window == 5
    assert t.groups == {key(b"er"): (0, 1)}
    nondefault = {k: int(v) for k, v in enumerate(t.shift) if v != 4}
    # frozen from brute_shift_table over both 5-byte prefixes
    assert nondefault == {0x636F: 3, 0x6572: 0, 0x6C6F: 3, 0x6F76: 2, 0x7665: 1}


def test_preprocess_minimal_window():
    t = preprocess(PatternSet.from_bytes([b"ab"]))
    assert t.window == 2
    assert t.shift[key(b"ab")] == 0
    assert np.count_nonzero(t.shift == 1) == 65535
    assert t.groups == {key(b"ab"): (0,)}


def test_duplicate_bodies_share_group():
    t = preprocess(PatternSet.from_bytes([b"same", b"same"]))
    assert t.groups == {key(b"me"): (0, 1)}
    assert scan(t, b"xsame") == [MatchEvent(0, 1, 5), MatchEvent(1, 1, 5)]


def test_shift_table_is_read_only(lover_cover):
    with pytest.raises(ValueError):
        lover_cover.shift[0] = 1


def test_window_too_large_for_byte_shifts():
    with pytest.raises(CapacityExceeded):
        preprocess(PatternSet.from_bytes([b"x" * 257]))
    assert preprocess(PatternSet.from_bytes([b"x" * 256])).shift.max() == 255


pattern_lists = st.lists(st.binary(min_size=2, max_size=12), min_size=1, max_size=10)


@settings(max_examples=60, deadline=None)
@given(pattern_lists)
def test_shift_formula_conformance(bodies):
    pset = PatternSet.from_bytes(bodies)
    t = preprocess(pset)
    assert t.shift.tolist() == brute_shift_table(list(pset), t.window)


@settings(max_examples=60, deadline=None)
@given(pattern_lists)
def test_groups_match_zero_shifts(bodies):
    t = preprocess(PatternSet.from_bytes(bodies))
    m = t.window
    zero_keys = set(np.flatnonzero(t.shift == 0).tolist())
    assert set(t.groups) == zero_keys
    for p in t.patterns:
        suffix = key(p.bytes[m - 2:m])
        assert [k for k, ids in t.groups.items() if p.id in ids] == [suffix]
    assert int(t.shift.max()) <= m - 1


# -- scan ---------------------------------------------------------------------

def test_scan_discover(lover_cover, kernel_name):
    assert scan(lover_cover, b"discover", kernel=kernel_name) == [MatchEvent(1, 3, 8)]


def test_scan_empty_text(lover_cover, kernel_name):
    assert scan(lover_cover, b"", kernel=kernel_name) == []
    assert scan(lover_cover, b"love", kernel=kernel_name) == []


def test_scan_modes_aa(kernel_name):
    t = preprocess(PatternSet.from_bytes([b"aa"]))
    assert scan(t, b"aaaa", ScanMode.ALL, kernel=kernel_name) == [
        MatchEvent(0, 0, 2), MatchEvent(0, 1, 3), MatchEvent(0, 2, 4)]
    assert scan(t, b"aaaa", "skip", kernel=kernel_name) == [
        MatchEvent(0, 0, 2), MatchEvent(0, 2, 4)]


def test_longer_pattern_checked_past_window(kernel_name):
    t = preprocess(PatternSet.from_bytes([b"ab", b"abcdef"]))
    assert scan(t, b"xxabcdef", kernel=kernel_name) == [MatchEvent(0, 2, 4), MatchEvent(1, 2, 8)]
    # truncated at end of text: long pattern must not match
    assert scan(t, b"xxabcde", kernel=kernel_name) == [MatchEvent(0, 2, 4)]


def test_skip_mode_advances_by_longest(kernel_name):
    t = preprocess(PatternSet.from_bytes([b"ab", b"abab"]))
    # ALL finds ab@0, abab@0, ab@2; SKIP jumps 4 after the first alignment
    assert scan(t, b"abab", "skip", kernel=kernel_name) == [MatchEvent(0, 0, 2), MatchEvent(1, 0, 4)]


def test_verify_at(lover_cover):
    assert verify_at(lover_cover, b"discover", 3) == [1]
    assert verify_at(lover_cover, b"discover", 0) == []
    t = preprocess(PatternSet.from_bytes([b"ab"]))
    assert verify_at(t, b"ab", 0) == [0]
    with pytest.raises(ValueError):
        verify_at(t, b"ab", 1)


def _check_sound(pset, text, events):
    for ev in events:
        body = pset[ev.pattern_id].bytes
        assert ev.end - ev.start == len(body)
        assert text[ev.start:ev.end] == body


@pytest.mark.parametrize("seed", range(40))
def test_oracle_equivalence_random(seed, kernel_name):
    rng = random.Random(seed)
    pats, text = random_case(rng, max_text=4096)
    pset = PatternSet(pats)
    t = preprocess(pset)
    all_events = scan(t, text, "all", kernel=kernel_name)
    skip_events = scan(t, text, "skip", kernel=kernel_name)
    assert {(e.pattern_id, e.start) for e in all_events} == naive_matches(pats, text)
    assert all_events == sorted(all_events, key=lambda e: (e.start, e.pattern_id))
    # skip events form a subsequence of all events
    it = iter(all_events)
    assert all(ev in it for ev in skip_events)
    _check_sound(pset, text, all_events)
    _check_sound(pset, text, skip_events)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.binary(min_size=2, max_size=8), min_size=1, max_size=6),
       st.binary(max_size=200))
def test_oracle_equivalence_hypothesis(bodies, text):
    pset = PatternSet.from_bytes(bodies)
    t = preprocess(pset)
    events = scan(t, text)
    assert {(e.pattern_id, e.start) for e in events} == naive_matches(pset, text)


@pytest.mark.parametrize("seed", range(20))
def test_progress_and_shift_bound(seed, kernel_name):
    rng = random.Random(1000 + seed)
    pats, text = random_case(rng, max_text=2048)
    t = preprocess(PatternSet(pats))
    m = t.window
    for mode in ("all", "skip"):
        starts = []
        events, counters = scan_with_stats(t, text, mode, kernel=kernel_name, record=starts)
        assert counters[0] == len(starts) <= max(len(text), 0)
        hits_at = {}
        for ev in events:
            hits_at[ev.start] = max(hits_at.get(ev.start, 0), ev.end - ev.start)
        for a, b in zip(starts, starts[1:]):
            assert b > a
            if mode == "skip" and a in hits_at:
                assert b - a == hits_at[a]
            else:
                assert b - a <= m - 1


@pytest.mark.parametrize("seed", range(20))
def test_gating_neutral(seed, kernel_name):
    rng = random.Random(2000 + seed)
    pats, text = random_case(rng, max_text=4096)
    t = preprocess(PatternSet(pats))
    for mode in ("all", "skip"):
        assert scan(t, text, mode, gating=True, kernel=kernel_name) == \
            scan(t, text, mode, gating=False, kernel=kernel_name)


@pytest.mark.parametrize("seed", range(20))
def test_kernels_agree(seed):
    from wmscan import kernel
    if len(kernel.KERNELS) < 2:
        pytest.skip("compiled kernel not built")
    rng = random.Random(3000 + seed)
    pats, text = random_case(rng, max_text=8192)
    t = preprocess(PatternSet(pats), bloom_bits=10)
    for mode in ("all", "skip"):
        a = scan_with_stats(t, text, mode, kernel="python")
        b = scan_with_stats(t, text, mode, kernel="cython")
        assert a == b


def test_tables_shared_across_threads(lover_cover):
    from concurrent.futures import ThreadPoolExecutor
    text = b"discover lover " * 500
    expected = scan(lover_cover, text)
    with ThreadPoolExecutor(4) as pool:
        results = list(pool.map(lambda _: scan(lover_cover, text), range(16)))
    assert all(r == expected for r in results)
