# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled scan kernel. Behaviour must stay identical to _kernel_py.run."""

from libc.string cimport memcmp

NAME = "cython"


cdef class Prepared:
    cdef const unsigned char[::1] shift
    cdef const unsigned char[::1] gate
    cdef const unsigned int[::1] group_start
    cdef const unsigned int[::1] members
    cdef const unsigned char[::1] pat_data
    cdef const unsigned int[::1] pat_offset
    cdef const unsigned int[::1] pat_len
    # keep the owners alive for the memoryviews
    cdef object _refs

    def __init__(self, shift, gate, group_start, members, pat_data,
                 pat_offset, pat_len):
        self._refs = (shift, gate, group_start, members, pat_data,
                      pat_offset, pat_len)
        self.shift = shift
        self.gate = gate
        self.group_start = group_start
        self.members = members
        self.pat_data = pat_data
        self.pat_offset = pat_offset
        self.pat_len = pat_len


def run(Prepared p, const unsigned char[::1] text, Py_ssize_t m, bint skip_mode,
        list record=None):
    if m < 2:
        raise ValueError("window must be at least 2")
    cdef Py_ssize_t n = text.shape[0]
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t last = n - m
    cdef Py_ssize_t max_shift = m - 1
    cdef Py_ssize_t length, longest
    cdef unsigned int key, s, g, g_end, idx
    cdef long long steps = 0, st_reads = 0, zero_shifts = 0
    cdef long long candidates = 0, pb_words = 0, matches = 0
    cdef const unsigned char *tp
    hits = []
    if n > 0:
        tp = &text[0]
    while i <= last:
        steps += 1
        if record is not None:
            record.append(i)
        key = (tp[i + m - 2] << 8) | tp[i + m - 1]
        if not p.gate[key]:
            i += max_shift
            continue
        st_reads += 1
        s = p.shift[key]
        if s:
            i += s
            continue
        zero_shifts += 1
        longest = 0
        g = p.group_start[key]
        g_end = p.group_start[key + 1]
        while g < g_end:
            idx = p.members[g]
            length = p.pat_len[idx]
            candidates += 1
            pb_words += (length + 7) >> 3
            if i + length <= n and memcmp(tp + i, &p.pat_data[p.pat_offset[idx]], length) == 0:
                hits.append((i, idx))
                matches += 1
                if length > longest:
                    longest = length
            g += 1
        if skip_mode and longest:
            i += longest
        else:
            i += 1
    return hits, (steps, st_reads, zero_shifts, candidates, pb_words, matches)
