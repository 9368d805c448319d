#!/usr/bin/env python3
"""Time the compiled slot kernel against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--slots 100000] [--repeat 3]

Both backends consume the same random draws, so the benchmark also checks
that their results are identical.
"""

import argparse
import statistics
import sys
import time

from smartban_saca.simulator import KERNELS, SimConfig, run

CASES = [(0, 1), (1, 4), (2, 8), (3, 16)]


def bench(cfg, backend, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = run(cfg, backend)
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if "cython" not in KERNELS:
        print("compiled kernel not built; only the Python fallback is available", file=sys.stderr)
    backends = [b for b in ("cython", "python") if b in KERNELS]

    print(f"{'up':>2} {'n':>3} {'backend':>8} {'best [s]':>10} {'median [s]':>11} {'Mslot-node/s':>13}")
    for up, n in CASES:
        cfg = SimConfig(up, n, args.slots, 1)
        results = {}
        for backend in backends:
            best, med, res = bench(cfg, backend, args.repeat)
            results[backend] = (best, res)
            rate = n * args.slots / best / 1e6
            print(f"{up:>2} {n:>3} {backend:>8} {best:10.4f} {med:11.4f} {rate:13.2f}")
        if len(results) == 2:
            (tc, rc), (tp, rp) = results["cython"], results["python"]
            same = "identical" if rc == rp else "MISMATCH"
            print(f"{'':>6} speedup x{tp / tc:.1f}, results {same}")
            if rc != rp:
                return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
