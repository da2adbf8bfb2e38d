"""wmscan command line: build, scan, dope, bench, inspect (and synth)."""

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import serialize
from .core import ScanMode, preprocess, scan
from .errors import CapacityExceeded, InputError
from .hwmodel import (DEFAULT_CLOCK_MHZ, CostModel, build_images, describe_key,
                      dump_images, estimate_trace_cycles)
from .ingest import load_signature_file
from .synth import TRACE_KINDS, signature_hex_lines, synthetic_signatures, synthetic_trace
from .trace import (HEXLINES, RAW, DEFAULT_CHUNK, dope, dumps_report, flatten,
                    load_trace, loads_report, save_trace)

log = logging.getLogger("wmscan")

MATCH_FIELDS = ("frame_index", "start", "end", "pattern_id", "pattern_name")
BENCH_FIELDS = ("trace", "bytes", "doping_percent", "cycles", "bitrate_mbps",
                "wall_seconds", "matches")


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Run record written next to the primary output as ``<out>.manifest.json``."""

    def __init__(self, command, inputs, parameters, seed=None):
        self.data = {
            "command": command,
            "inputs": {str(p): _digest(p) for p in inputs},
            "parameters": parameters,
            "seed": seed,
            "outputs": [],
        }

    def write(self, out, outputs):
        self.data["outputs"] = [str(p) for p in outputs]
        path = f"{out}.manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _names_path(tables_path):
    return f"{tables_path}.names"


def _load_tables(path):
    names = {}
    names_path = _names_path(path)
    if os.path.exists(names_path):
        with open(names_path, encoding="utf-8") as fh:
            for row in csv.reader(fh, delimiter="\t"):
                if row:
                    names[int(row[0])] = row[1]
    return serialize.load(path, names)


def _default_seed():
    return int(os.environ.get("WMSCAN_SEED", "0"))


def _params(args, *keys):
    return {k: getattr(args, k) for k in keys}


def cmd_build(args):
    manifest = Manifest("build", [args.sigs],
                        _params(args, "format", "bloom_bits", "bloom_hashes", "bloom_seed"))
    pset, skips, header = load_signature_file(args.sigs, args.format)
    if header is not None:
        log.info("header: %s", ":".join(header.fields))
    tables = preprocess(pset, bloom_bits=args.bloom_bits, bloom_hashes=args.bloom_hashes,
                        bloom_seed=args.bloom_seed)
    serialize.save(tables, args.out)
    names_path = _names_path(args.out)
    with open(names_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerows((p.id, p.label) for p in pset)
    skips_path = f"{args.out}.skips.csv"
    with open(skips_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("line", "reason"))
        writer.writerows((n, "wildcard") for n in skips.wildcard)
    print(f"loaded {len(pset)} patterns, window {tables.window}, "
          f"max shift {int(tables.shift.max())}, {len(tables.groups)} suffix groups; "
          f"skipped {skips.skipped} wildcard signatures")
    manifest.write(args.out, [args.out, names_path, skips_path])


def _scan_trace(tables, trace, mode, flat, gating=True):
    rows = []
    if flat:
        buffers = [(0, flatten(trace))]
    else:
        buffers = enumerate(trace.frames)
    for frame_index, buf in buffers:
        for ev in scan(tables, buf, mode, gating):
            rows.append((frame_index, ev.start, ev.end, ev.pattern_id))
    rows.sort()
    return rows


def cmd_scan(args):
    manifest = Manifest("scan", [args.tables, args.trace],
                        _params(args, "trace_format", "chunk", "mode", "flat", "no_bloom"))
    tables = _load_tables(args.tables)
    trace = load_trace(args.trace, args.trace_format, args.chunk)
    rows = _scan_trace(tables, trace, ScanMode(args.mode), args.flat, not args.no_bloom)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MATCH_FIELDS)
        for frame_index, start, end, pid in rows:
            writer.writerow((frame_index, start, end, pid, tables.patterns[pid].label))
    print(f"{len(rows)} matches in {len(trace)} frames")
    manifest.write(args.out, [args.out])


def cmd_dope(args):
    seed = args.seed if args.seed is not None else _default_seed()
    manifest = Manifest("dope", [args.trace, args.sigs],
                        _params(args, "rate", "trace_format", "chunk", "sig_format"), seed)
    trace = load_trace(args.trace, args.trace_format, args.chunk)
    pset, _, _ = load_signature_file(args.sigs, args.sig_format)
    doped, report = dope(trace, pset, args.rate, seed)
    save_trace(doped, args.out)
    report_path = args.report or f"{args.out}.report.csv"
    with open(report_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_report(report))
    print(f"doped {report.doped_lines}/{report.total_lines} lines "
          f"({report.doping_percent:.2f}%), {report.base_bytes} -> {report.doped_bytes} bytes")
    manifest.write(args.out, [args.out, report_path])


def _trace_files(directory, pattern):
    return sorted(p for p in Path(directory).glob(pattern)
                  if p.is_file() and not p.name.endswith((".report.csv", ".manifest.json")))


def cmd_bench(args):
    traces = _trace_files(args.traces, args.glob)
    cost = CostModel.from_file(args.cost) if args.cost else CostModel()
    inputs = [args.tables] + traces + ([args.cost] if args.cost else [])
    manifest = Manifest("bench", inputs,
                        _params(args, "clock_mhz", "trace_format", "chunk", "glob"))
    tables = _load_tables(args.tables)
    rows = []
    for path in traces:
        trace = load_trace(path, args.trace_format, args.chunk)
        start = time.perf_counter()
        report = estimate_trace_cycles(tables, trace.frames, cost, args.clock_mhz)
        wall = time.perf_counter() - start
        report_path = Path(f"{path}.report.csv")
        doping = ""
        if report_path.exists():
            doping = repr(loads_report(report_path.read_text(encoding="utf-8")).doping_percent)
        bitrate = report.bitrate_mbps
        rows.append((path.name, report.bytes_processed, doping, report.total_cycles,
                     "" if bitrate is None else f"{bitrate:.3f}", f"{wall:.6f}",
                     report.matches))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_FIELDS)
        writer.writerows(rows)
    for row in rows:
        print("\t".join(str(x) for x in row))
    manifest.write(args.out, [args.out])


def _parse_key(parts):
    text = "".join(parts).replace("0x", "")
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise InputError(f"bad key {' '.join(parts)!r}; expected two hex bytes") from None
    if len(raw) != 2:
        raise InputError("key must be exactly two bytes")
    return (raw[0] << 8) | raw[1]


def cmd_inspect(args):
    tables = _load_tables(args.tables)
    images = build_images(tables)
    if args.key:
        print(describe_key(tables, images, _parse_key(args.key)))
    if args.dump:
        manifest = dump_images(images, f"{args.dump}.bin", f"{args.dump}.json")
        for sec in manifest["sections"]:
            print(f"{sec['name']:<13} offset {sec['offset']:>10}  length {sec['length']:>10}")


def cmd_synth(args):
    seed = args.seed if args.seed is not None else _default_seed()
    if args.what == "sigs":
        pset = synthetic_signatures(args.count, args.min_len, seed=seed)
        Path(args.out).write_text("\n".join(signature_hex_lines(pset)) + "\n", encoding="utf-8")
    else:
        trace = synthetic_trace(args.kind, args.frames, seed, code_fraction=args.code_fraction)
        save_trace(trace, args.out)


def build_parser():
    parser = argparse.ArgumentParser(prog="wmscan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def trace_opts(p):
        p.add_argument("--trace-format", choices=(HEXLINES, RAW), default=HEXLINES)
        p.add_argument("--chunk", type=int, default=DEFAULT_CHUNK,
                       help="frame size for raw traces")

    p = sub.add_parser("build", help="build WMTB tables from a signature file")
    p.add_argument("--sigs", required=True)
    p.add_argument("--format", choices=("hex", "cvd-header"), default="hex")
    p.add_argument("--out", required=True)
    p.add_argument("--bloom-bits", type=int, default=16)
    p.add_argument("--bloom-hashes", type=int, default=1)
    p.add_argument("--bloom-seed", type=int, default=0)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("scan", help="scan a trace, write matches CSV")
    p.add_argument("--tables", required=True)
    p.add_argument("--trace", required=True)
    trace_opts(p)
    p.add_argument("--mode", choices=[m.value for m in ScanMode], default="all")
    framing = p.add_mutually_exclusive_group()
    framing.add_argument("--per-frame", dest="flat", action="store_false")
    framing.add_argument("--flat", dest="flat", action="store_true")
    p.add_argument("--no-bloom", action="store_true", help="read the shift table for every window")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scan, flat=False)

    p = sub.add_parser("dope", help="inject signatures into a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--sigs", required=True)
    p.add_argument("--sig-format", choices=("hex", "cvd-header"), default="hex")
    trace_opts(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=None, help="default: $WMSCAN_SEED or 0")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="default: <out>.report.csv")
    p.set_defaults(func=cmd_dope)

    p = sub.add_parser("bench", help="cycle-model throughput over a directory of traces")
    p.add_argument("--tables", required=True)
    p.add_argument("--traces", required=True)
    p.add_argument("--glob", default="*.hex")
    trace_opts(p)
    p.add_argument("--clock-mhz", type=float, default=DEFAULT_CLOCK_MHZ)
    p.add_argument("--cost", default=None, help="key=value cost file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect", help="show ST/HT/PB contents for a byte-pair")
    p.add_argument("--tables", required=True)
    p.add_argument("--key", nargs="+", metavar="HH")
    p.add_argument("--dump", metavar="PREFIX", help="write PREFIX.bin and PREFIX.json images")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("synth", help="generate synthetic signatures or traces")
    p.add_argument("what", choices=("sigs", "trace"))
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=2500)
    p.add_argument("--min-len", type=int, default=15)
    p.add_argument("--kind", choices=TRACE_KINDS, default="download")
    p.add_argument("--frames", type=int, default=1000)
    p.add_argument("--code-fraction", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except CapacityExceeded as exc:
        print(f"wmscan: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError, ValueError) as exc:
        print(f"wmscan: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
