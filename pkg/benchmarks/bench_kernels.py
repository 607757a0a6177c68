"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the median time per call for each backend and the speedup. Outputs of
the two backends are compared as well; a mismatch aborts the run.
"""
import argparse
import math
import statistics
import sys
import time

import numpy as np

from coexist import kernels


def _median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def cases():
    T = 2.0 * math.pi
    for n in (512, 4096):
        h = T / n
        t = np.arange(n + 1) * h
        a_nodes = 1.0 / 9.0 + 0.05 * np.cos(t)
        a_mid = 1.0 / 9.0 + 0.05 * np.cos(t[:-1] + 0.5 * h)
        yield f"rk4_hill n={n}", "rk4_hill", (a_nodes, a_mid, h)
    for steps in (4096, 65536):
        s = np.linspace(0.0, 2.0 * math.pi, 4 * steps, endpoint=False)
        fx, fy = np.cos(3 * s) + 0.2, np.sin(3 * s)
        yield f"winding_sum samples={4 * steps}", "winding_sum", (fx, fy)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'case':32s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for label, name, call_args in cases():
        py = getattr(kernels.python, name)
        tp = _median_time(lambda: py(*call_args), args.repeat)
        if kernels.compiled is None:
            print(f"{label:32s} {tp * 1e3:12.3f} {'-':>14s} {'-':>8s}")
            continue
        cc = getattr(kernels.compiled, name)
        a, b = np.asarray(py(*call_args), dtype=float), np.asarray(cc(*call_args), dtype=float)
        if not np.allclose(a, b, rtol=1e-12, atol=1e-12):
            print(f"{label}: backends disagree", file=sys.stderr)
            return 1
        tc = _median_time(lambda: cc(*call_args), args.repeat)
        print(f"{label:32s} {tp * 1e3:12.3f} {tc * 1e3:14.3f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
