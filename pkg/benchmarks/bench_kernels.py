"""Compare the compiled and pure-Python kernels on the hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--size 1000000]

Each row reports the best of ``--repeat`` runs and checks that both backends
return identical results.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from czc import kernels
from czc.catalog import ellipsoid
from czc.index import collapse, mean_index


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(size):
    _, data = ellipsoid(["1", "sqrt2", "sqrt3", "sqrt5"])
    orbits = [collapse(o) for o in data.orbits]
    o = orbits[0]
    params, lin = o.kernel_params(), o.linear_total
    mu_f = np.array([float(mean_index(u)) for u in orbits])
    pivot = int(np.argmax(mu_f))

    yield ("orbit_indices_range", f"{size} iterates",
           lambda b: kernels.orbit_indices_range(params, lin, 1, size + 1, backend=b),
           lambda x, y: np.array_equal(x, y))
    ks = list(range(1, size // 20 + 1))
    yield ("orbit_indices (list)", f"{len(ks)} iterates",
           lambda b: kernels.orbit_indices(params, lin, ks, backend=b),
           lambda x, y: x == y)
    tests = list(range(8, 8 * (size // 200) + 1, 8))
    yield ("clause_ii_ok", f"{len(tests)} pivots, l0=3",
           lambda b: [kernels.clause_ii_ok(params, lin, k, 0, 3, backend=b) for k in tests],
           lambda x, y: x == y)
    yield ("pivot_scan", f"{size} candidates, N=8",
           lambda b: kernels.pivot_scan(mu_f, pivot, 8, 0.5, 1, size + 1, 1 << 30, backend=b),
           lambda x, y: x == y)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=1_000_000)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernels unavailable; only the Python backend can run")
    print(f"{'kernel':<22} {'workload':<26} {'python s':>10} {'cython s':>10} {'speedup':>8}  equal")
    for name, work, fn, same in cases(args.size):
        tp, outp = _best(lambda: fn("python"), args.repeat)
        if kernels.BACKEND == "cython":
            tc, outc = _best(lambda: fn("cython"), args.repeat)
            print(f"{name:<22} {work:<26} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x  {same(outp, outc)}")
        else:
            print(f"{name:<22} {work:<26} {tp:>10.4f} {'-':>10} {'-':>8}  -")


if __name__ == "__main__":
    main()
