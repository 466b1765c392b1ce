"""Compiled vs pure-Python timings for the metric kernels and the simulator.

Usage: python3 benchmarks/bench_kernels.py [--vertices N] [--sim-vertices N]

Metric kernels are timed in-process by calling each function's ``.py_func``
next to its compiled form. The simulator path is chosen at import time, so
its fallback is timed in a subprocess with PUSHPULL_DISABLE_NUMBA=1.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from pushpull import _metric_kernels as K
from pushpull._jit import USE_NUMBA
from pushpull.synth import random_graph


def best_of(fn, *args, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


SIM_SNIPPET = """
import json, sys, time
import numpy as np
from pushpull.memsim import simulate
from pushpull.synth import random_graph
g = random_graph({n}, {m}, np.random.default_rng(3))
simulate(random_graph(64, 128, np.random.default_rng(0)), "PR", "SGR")  # warm-up / compile
t0 = time.perf_counter()
rep = simulate(g, "PR", "SGR")
print(json.dumps({{"seconds": time.perf_counter() - t0, "cycles": rep.total_cycles}}))
"""


def time_simulation(n: int, disable: bool) -> dict:
    env = dict(os.environ)
    env.pop("PUSHPULL_DISABLE_NUMBA", None)
    if disable:
        env["PUSHPULL_DISABLE_NUMBA"] = "1"
    code = SIM_SNIPPET.format(n=n, m=3 * n)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=200_000)
    ap.add_argument("--sim-vertices", type=int, default=2_000)
    args = ap.parse_args()
    if not USE_NUMBA:
        sys.exit("numba is disabled in this environment; unset PUSHPULL_DISABLE_NUMBA")

    g = random_graph(args.vertices, 4 * args.vertices, np.random.default_rng(1))
    deg = g.out_degrees()
    cases = [
        ("locality_counts", K.locality_counts_loop, (g.out_offsets, g.out_targets, 256)),
        ("warp_maxima", K.warp_maxima_loop, (deg, 32)),
        ("imbalance_marks", K.imbalance_marks_loop, (deg, 32, 256, 10.0, 100)),
    ]
    print(f"graph: {g.num_vertices} vertices, {g.num_edges} edges")
    print(f"{'kernel':<18}{'numba s':>10}{'python s':>11}{'speedup':>10}")
    for name, fn, fargs in cases:
        fn(*fargs)  # compile
        fast = best_of(fn, *fargs)
        slow = best_of(fn.py_func, *fargs, repeat=1)
        print(f"{name:<18}{fast:>10.4f}{slow:>11.3f}{slow / fast:>9.0f}x")

    fast = time_simulation(args.sim_vertices, disable=False)
    slow = time_simulation(args.sim_vertices, disable=True)
    assert fast["cycles"] == slow["cycles"], "paths disagree"
    print(f"{'simulate PR SGR':<18}{fast['seconds']:>10.4f}{slow['seconds']:>11.3f}"
          f"{slow['seconds'] / fast['seconds']:>9.0f}x   ({args.sim_vertices} vertices, {fast['cycles']} cycles)")


if __name__ == "__main__":
    main()
