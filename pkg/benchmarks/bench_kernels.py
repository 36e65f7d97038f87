"""Timing comparison of the two kernel backends.

Runs the hot loops (all-pairs BFS hop counts, fixed-step RK4) under the
numba build and under the pure-numpy fallback, each in its own process so
the ``NETFDI_DISABLE_NUMBA`` switch is honored at import time.  The first
call per workload is a discarded warmup, which also absorbs the JIT
compile; reported numbers are the best of three timed repeats.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

HOP_SIZES = (100, 300, 600)
RK4_CASES = ((50, 5000), (200, 5000))  # (state dimension, steps)


def _workloads():
    from netfdi.kernels import all_pairs_hops, rk4_linear

    rng = np.random.default_rng(8)
    jobs = []
    for n in HOP_SIZES:
        adj = rng.random((n, n)) < 0.05
        np.fill_diagonal(adj, False)
        jobs.append((f"all_pairs_hops n={n}", lambda a=adj: all_pairs_hops(a)))
    for n, steps in RK4_CASES:
        a = rng.uniform(-0.5, 0.5, (n, n)) / n
        x0 = rng.uniform(0.5, 1.5, n)
        u_half = np.zeros((2 * steps + 1, n))
        jobs.append((f"rk4_linear n={n} steps={steps}",
                     lambda a=a, x0=x0, u=u_half, s=steps:
                     rk4_linear(a, x0, u, 1e-3, s)))
    return jobs


def _run_inner(repeat: int) -> None:
    from netfdi.kernels import active_backend

    rows = []
    for name, job in _workloads():
        job()  # warmup; compiles the jitted build on its first call
        best = min(_timed(job) for _ in range(repeat))
        rows.append({"name": name, "seconds": best})
    json.dump({"backend": active_backend(), "rows": rows}, sys.stdout)


def _timed(job) -> float:
    start = time.perf_counter()
    job()
    return time.perf_counter() - start


def _run_backend(disable_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env["NETFDI_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--inner",
         "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--inner", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args(argv)
    if args.inner:
        _run_inner(args.repeat)
        return 0

    fast = _run_backend(disable_numba=False, repeat=args.repeat)
    slow = _run_backend(disable_numba=True, repeat=args.repeat)
    if fast["backend"] == slow["backend"]:
        print(f"numba unavailable; both runs used the "
              f"{fast['backend']} backend")
    width = max(len(r["name"]) for r in fast["rows"])
    print(f"{'workload':<{width}}  {fast['backend']:>10}  "
          f"{slow['backend']:>10}  {'speedup':>8}")
    for f_row, s_row in zip(fast["rows"], slow["rows"]):
        ratio = s_row["seconds"] / f_row["seconds"]
        print(f"{f_row['name']:<{width}}  {f_row['seconds']:>9.4f}s  "
              f"{s_row['seconds']:>9.4f}s  {ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
