"""Traffic traces: hex-line frame dumps, raw chunking, and pattern doping."""

import csv
import io
import os
import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import EmptyPatternSet, EmptyTrace
from .ingest import decode_hex

HEXLINES = "hexlines"
RAW = "raw"
DEFAULT_CHUNK = 1514


@dataclass
class TraceFile:
    frames: list
    source_name: str = "<memory>"

    def __len__(self):
        return len(self.frames)

    @property
    def total_bytes(self):
        return sum(len(f) for f in self.frames)


class Injection(NamedTuple):
    frame_index: int
    byte_offset: int
    pattern_id: int


@dataclass
class DopingReport:
    total_lines: int
    doped_lines: int
    injections: list = field(default_factory=list)
    base_bytes: int = 0
    doped_bytes: int = 0

    @property
    def doping_percent(self):
        return doping_percentage(self)


def _parse_hexlines(text, source_name):
    frames = []
    for number, line in enumerate(text.splitlines(), 1):
        compact = "".join(line.split())
        if compact:
            frames.append(decode_hex(compact, number))
    return TraceFile(frames, source_name)


def load_trace(source, fmt=HEXLINES, chunk=DEFAULT_CHUNK):
    """Load a trace from a path (str or PathLike) or from in-memory bytes."""
    if isinstance(source, (str, os.PathLike)):
        name = os.fspath(source)
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        name = "<memory>"
        data = bytes(source)
    if fmt == HEXLINES:
        return _parse_hexlines(data.decode("utf-8"), name)
    if fmt == RAW:
        if chunk < 1:
            raise ValueError("chunk must be >= 1")
        return TraceFile([data[i:i + chunk] for i in range(0, len(data), chunk)], name)
    raise ValueError(f"unknown trace format {fmt!r}")


def dumps_hexlines(trace):
    return "".join(frame.hex() + "\n" for frame in trace.frames)


def save_trace(trace, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_hexlines(trace))


def flatten(trace):
    return b"".join(trace.frames)


def doping_percentage(report):
    if report.total_lines <= 0:
        raise EmptyTrace("doping percentage of an empty trace")
    return 100 * report.doped_lines / report.total_lines


def dope(trace, patterns, rate, seed):
    """Insert one random pattern into each of ``round(rate * N)`` random frames.

    Selection, pattern choice and offsets come from ``random.Random(seed)``,
    so the same inputs always yield the same doped trace. Bytes are inserted,
    never overwritten; the offset is uniform over ``[0, len(frame)]``.
    """
    if not 0 <= rate <= 1:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    if not trace.frames:
        raise EmptyTrace("cannot dope an empty trace")
    pats = list(patterns)
    if not pats:
        raise EmptyPatternSet("no patterns to inject")
    total = len(trace.frames)
    rng = random.Random(seed)
    selected = sorted(rng.sample(range(total), round(rate * total)))
    frames = list(trace.frames)
    injections = []
    for idx in selected:
        pat = rng.choice(pats)
        frame = frames[idx]
        offset = rng.randint(0, len(frame))
        frames[idx] = frame[:offset] + pat.bytes + frame[offset:]
        injections.append(Injection(idx, offset, pat.id))
    doped = TraceFile(frames, trace.source_name)
    report = DopingReport(total, len(selected), injections,
                          base_bytes=trace.total_bytes,
                          doped_bytes=doped.total_bytes)
    return doped, report


REPORT_FIELDS = ("frame_index", "byte_offset", "pattern_id")


def dumps_report(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    writer.writerows(report.injections)
    buf.write(
        f"# total_lines={report.total_lines},doped_lines={report.doped_lines},"
        f"doping_percent={report.doping_percent!r},base_bytes={report.base_bytes},"
        f"doped_bytes={report.doped_bytes}\n"
    )
    return buf.getvalue()


def loads_report(text):
    rows = []
    summary = {}
    lines = text.splitlines()
    for line in lines:
        if line.startswith("#"):
            for item in line[1:].strip().split(","):
                k, _, v = item.partition("=")
                summary[k.strip()] = v.strip()
    body = [line for line in lines if line and not line.startswith("#")]
    for row in csv.DictReader(body):
        rows.append(Injection(*(int(row[f]) for f in REPORT_FIELDS)))
    return DopingReport(
        total_lines=int(summary.get("total_lines", 0)),
        doped_lines=int(summary.get("doped_lines", len(rows))),
        injections=rows,
        base_bytes=int(summary.get("base_bytes", 0)),
        doped_bytes=int(summary.get("doped_bytes", 0)),
    )
