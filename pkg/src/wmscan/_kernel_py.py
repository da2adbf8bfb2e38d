"""Pure-Python scan kernel.

Mirrors ``_kernel.pyx`` exactly; used when the compiled extension is not
built or ``WMSCAN_KERNEL=python`` is set.
"""

NAME = "python"


class Prepared:
    __slots__ = ("shift", "gate", "group_start", "members", "pat_data",
                 "pat_offset", "pat_len")

    def __init__(self, shift, gate, group_start, members, pat_data,
                 pat_offset, pat_len):
        self.shift = bytes(shift)
        self.gate = bytes(gate)
        self.group_start = [int(x) for x in group_start]
        self.members = [int(x) for x in members]
        self.pat_data = bytes(pat_data)
        self.pat_offset = [int(x) for x in pat_offset]
        self.pat_len = [int(x) for x in pat_len]


def run(p, text, m, skip_mode, record=None):
    """Scan ``text`` with window ``m``.

    Returns ``(hits, counters)`` where hits are ``(start, pattern_index)``
    pairs in scan order and counters is ``(steps, st_reads, zero_shifts,
    candidates, pb_words, matches)``. If ``record`` is a list, every window
    start visited is appended to it.
    """
    if m < 2:
        raise ValueError("window must be at least 2")
    text = bytes(text)
    n = len(text)
    shift = p.shift
    gate = p.gate
    group_start = p.group_start
    members = p.members
    pat_data = p.pat_data
    pat_offset = p.pat_offset
    pat_len = p.pat_len
    max_shift = m - 1
    steps = st_reads = zero_shifts = candidates = pb_words = matches = 0
    hits = []
    i = 0
    last = n - m
    while i <= last:
        steps += 1
        if record is not None:
            record.append(i)
        key = (text[i + m - 2] << 8) | text[i + m - 1]
        if not gate[key]:
            i += max_shift
            continue
        st_reads += 1
        s = shift[key]
        if s:
            i += s
            continue
        zero_shifts += 1
        longest = 0
        for g in range(group_start[key], group_start[key + 1]):
            idx = members[g]
            length = pat_len[idx]
            candidates += 1
            pb_words += (length + 7) >> 3
            off = pat_offset[idx]
            if i + length <= n and text[i:i + length] == pat_data[off:off + length]:
                hits.append((i, idx))
                matches += 1
                if length > longest:
                    longest = length
        if skip_mode and longest:
            i += longest
        else:
            i += 1
    return hits, (steps, st_reads, zero_shifts, candidates, pb_words, matches)
