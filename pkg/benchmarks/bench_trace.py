"""Time critical-graph construction with the compiled and the pure-Python kernel.

Usage: python benchmarks/bench_trace.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from stokesgraph import _kernel, _trace_py
from stokesgraph.quad_diff import QuadraticDifferential, critical_graph

PARAMS = (2 + 0.2j, -2 + 0.3j, 1j, 2 + np.sqrt(3) * 1j, 0.3 + 0.1j, -0.7 + 2.5j)


def _time(kernel, repeat: int) -> tuple[float, list]:
    saved = _kernel.trace_kernel, _kernel.singular_integral
    _kernel.trace_kernel, _kernel.singular_integral = kernel.trace_kernel, kernel.singular_integral
    try:
        best = np.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            graphs = [critical_graph(QuadraticDifferential.from_parameter(a)) for a in PARAMS]
            best = min(best, time.perf_counter() - t0)
    finally:
        _kernel.trace_kernel, _kernel.singular_integral = saved
    return best, graphs


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    t_py, g_py = _time(_trace_py, args.repeat)
    print(f"python kernel : {t_py:8.3f} s for {len(PARAMS)} graphs")
    if _kernel.BACKEND != "cython":
        print("compiled kernel not built; nothing to compare")
        return
    from stokesgraph import _trace_c

    t_c, g_c = _time(_trace_c, args.repeat)
    print(f"cython kernel : {t_c:8.3f} s for {len(PARAMS)} graphs  (speed-up {t_py / t_c:.1f}x)")
    dev = max(float(np.max(np.abs(ea.trajectory.points - eb.trajectory.points)))
              for ga, gb in zip(g_py, g_c) for ea, eb in zip(ga.edges, gb.edges))
    print(f"max sample difference between kernels: {dev:.2e}")


if __name__ == "__main__":
    main()
