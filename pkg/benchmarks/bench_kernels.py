"""Benchmark the numba kernels against the pure-numpy fallback.

Runs interval merging and grid coverage on synthetic workloads under both
backends and prints a timing table.  The numpy path is selected by
re-importing the kernel module with CFCRIT_DISABLE_NUMBA=1 in a
subprocess, so each backend is measured in a clean interpreter.

Usage: python benchmarks/bench_kernels.py [--sizes 1000,100000,1000000]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKER = textwrap.dedent(
    """
    import json, sys, time
    import numpy as np
    from cfcrit import _kernels

    sizes = json.loads(sys.argv[1])
    rng = np.random.default_rng(42)
    out = {"backend": _kernels.backend_name(), "merge": {}, "coverage": {}}
    for n in sizes:
        lefts = np.sort(rng.random(n))
        rights = lefts + rng.random(n) * (0.5 / n)
        # warm up (includes numba compilation)
        _kernels.merge_sorted(lefts[:10], rights[:10])
        reps = max(1, 10**6 // n)
        t0 = time.perf_counter()
        for _ in range(reps):
            _kernels.merge_sorted(lefts, rights)
        out["merge"][str(n)] = (time.perf_counter() - t0) / reps

        m = min(n, 10**4)
        _kernels.covered_gridpoints(lefts[:10], rights[:10], 1000)
        t0 = time.perf_counter()
        _kernels.covered_gridpoints(lefts[:m], rights[:m], 10**6)
        out["coverage"][str(m)] = time.perf_counter() - t0
    print(json.dumps(out))
    """
)


def run(disable_numba: bool, sizes):
    env = dict(os.environ)
    env["CFCRIT_DISABLE_NUMBA"] = "1" if disable_numba else ""
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(sizes)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1000,100000,1000000")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    results = [run(False, sizes), run(True, sizes)]
    names = [r["backend"] for r in results]
    if names[0] == names[1]:
        print(f"note: numba unavailable, both runs used the {names[0]} backend")

    for kernel in ("merge", "coverage"):
        print(f"\n{kernel} kernel (seconds per call)")
        print(f"{'n':>10}  " + "  ".join(f"{n:>12}" for n in names) + "  speedup")
        keys = sorted(results[0][kernel], key=int)
        for k in keys:
            a = results[0][kernel][k]
            b = results[1][kernel][k]
            speed = b / a if a > 0 else float("inf")
            print(f"{k:>10}  {a:12.3e}  {b:12.3e}  {speed:6.2f}x")


if __name__ == "__main__":
    main()
