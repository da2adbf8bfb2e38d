"""Throughput of the compiled and pure-Python scan kernels.

    python benchmarks/bench_kernels.py [--frames N] [--repeat R]

Scans synthetic traffic against a 2500-signature table with each available
kernel and reports MB/s. Results are checked for agreement before timing.
"""

import argparse
import time

from wmscan import kernel
from wmscan.core import preprocess, scan
from wmscan.ingest import load_hex_signatures
from wmscan.synth import signature_hex_lines, synthetic_signatures, synthetic_trace
from wmscan.trace import dope, flatten


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    pset, _ = load_hex_signatures(signature_hex_lines(synthetic_signatures(2500, seed=args.seed)))
    tables = preprocess(pset)
    workloads = {}
    for kind in ("download", "mixed"):
        base = synthetic_trace(kind, args.frames, seed=args.seed)
        doped, _ = dope(base, pset, 0.1171, seed=args.seed)
        workloads[kind] = flatten(doped)

    print(f"{'workload':10} {'mode':5} {'kernel':8} {'MB/s':>10} {'speedup':>8}")
    for kind, text in workloads.items():
        for mode in ("all", "skip"):
            ref = scan(tables, text, mode, kernel="python")
            speeds = {}
            for name in sorted(kernel.KERNELS):
                assert scan(tables, text, mode, kernel=name) == ref, name
                secs = _time(lambda: scan(tables, text, mode, kernel=name), args.repeat)
                speeds[name] = len(text) / secs / 1e6
            for name, mbs in speeds.items():
                print(f"{kind:10} {mode:5} {name:8} {mbs:10.2f} {mbs / speeds['python']:7.1f}x")


if __name__ == "__main__":
    main()
