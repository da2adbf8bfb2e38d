"""Seeded synthetic signature sets and traffic traces.

Stand-ins for a cleaned ClamAV body-signature list and captured traffic when
the real data is not at hand. Everything is driven by ``random.Random(seed)``.
"""

import random

from .core import Pattern, PatternSet
from .trace import TraceFile

TRACE_KINDS = ("download", "mixed", "remote")

_HTTP_WORDS = [
    b"GET ", b"POST ", b"HTTP/1.1", b"Host: ", b"User-Agent: Mozilla/5.0",
    b"Accept: */*", b"Content-Type: text/html", b"Content-Length: ",
    b"Connection: keep-alive", b"Cookie: ", b"<html>", b"<div class=\"",
    b"</div>", b"<script>", b"function(", b"var ", b"return ", b"\r\n",
]


def _code_byte_weights():
    # Zipf-like weights over a fixed shuffled byte order, roughly the skew of
    # executable code (a few byte values dominate). Shared by signatures and
    # executable payloads so the two look like the same instruction stream.
    order = list(range(256))
    random.Random(0x86).shuffle(order)
    weights = [0.0] * 256
    for rank, b in enumerate(order, 1):
        weights[b] = 1.0 / rank
    return weights


CODE_WEIGHTS = _code_byte_weights()


def synthetic_signatures(count=2500, min_len=15, mean_extra=15, max_len=128, seed=0):
    """Random byte signatures, the shortest exactly ``min_len`` bytes long.

    Lengths are ``min_len`` plus a geometric excess with mean ``mean_extra``.
    Bodies are drawn from a skewed code-like byte distribution and are
    distinct.
    """
    rng = random.Random(seed)
    weights = CODE_WEIGHTS
    population = range(256)
    p_stop = 1.0 / (mean_extra + 1)
    seen = set()
    patterns = []
    while len(patterns) < count:
        if not patterns:
            length = min_len
        else:
            extra = 0
            while rng.random() > p_stop and min_len + extra < max_len:
                extra += 1
            length = min_len + extra
        body = bytes(rng.choices(population, weights, k=length))
        if body in seen:
            continue
        seen.add(body)
        patterns.append(Pattern(len(patterns), body, f"Synth.Sig-{len(patterns)}"))
    return PatternSet(patterns)


def signature_hex_lines(pset):
    """Render a pattern set as ndb-style ``name:0:*:hex`` lines."""
    return [f"{p.label}:0:*:{p.bytes.hex()}" for p in pset]


def _download_frames(rng, frames, code_fraction):
    # A file transfer in 1460-byte payloads; each 4 KiB file block is either
    # code-like or compressed (uniform) data.
    block, mss = 4096, 1460
    need = frames * mss
    stream = bytearray()
    while len(stream) < need:
        if rng.random() < code_fraction:
            stream += bytes(rng.choices(range(256), CODE_WEIGHTS, k=block))
        else:
            stream += rng.randbytes(block)
    return [bytes(stream[i:i + mss]) for i in range(0, need, mss)]


def synthetic_trace(kind="download", frames=1000, seed=0, name=None, code_fraction=0.0):
    """Generate a trace of ``frames`` frames.

    ``download``: a file transfer; ``code_fraction`` of its blocks are
    code-like (an uncompressed executable), the rest compressed-looking
    random bytes.
    ``mixed``: HTTP-like text frames interleaved with binary ones.
    ``remote``: short frames with a skewed byte distribution.
    """
    if kind not in TRACE_KINDS:
        raise ValueError(f"kind must be one of {TRACE_KINDS}")
    rng = random.Random(seed)
    if kind == "download":
        return TraceFile(_download_frames(rng, frames, code_fraction),
                         name or f"synthetic-download-{seed}")
    out = []
    for _ in range(frames):
        if kind == "mixed":
            if rng.random() < 0.5:
                parts = []
                size = rng.randint(200, 1200)
                while sum(map(len, parts)) < size:
                    parts.append(rng.choice(_HTTP_WORDS))
                    parts.append(str(rng.randint(0, 99999)).encode())
                out.append(b"".join(parts))
            else:
                out.append(rng.randbytes(rng.randint(64, 1460)))
        else:
            size = rng.randint(40, 300)
            out.append(bytes(rng.choices(range(256), CODE_WEIGHTS, k=size)))
    return TraceFile(out, name or f"synthetic-{kind}-{seed}")
