"""Compare the compiled and numpy kernel backends.

Run ``python3 benchmarks/bench_kernels.py [--rows R] [--n N] [--repeat K]``.
Prints the best-of-K wall time per backend and kernel and the largest
absolute difference between backends.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from paretogof.kernels import backends


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=500, help="samples per batch")
    p.add_argument("--n", type=int, default=50, help="sample size")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    X = (1.0 - rng.random((args.rows, args.n))) ** -1.0
    impls = backends()
    calls = {
        "ds1": lambda m: m.ds1_batch(X),
        "ds2": lambda m: m.ds2_batch(X),
        "ds3": lambda m: m.ds3_batch(X),
    }
    print(f"rows={args.rows} n={args.n} backends={', '.join(impls)}")
    print(f"{'kernel':<6} " + " ".join(f"{b:>12}" for b in impls) + f" {'speedup':>9} {'max|diff|':>10}")
    for name, call in calls.items():
        times, outs = {}, {}
        for b, m in impls.items():
            times[b], outs[b] = _time(lambda: call(m), args.repeat)
        cells = " ".join(f"{times[b] * 1e3:>10.2f}ms" for b in impls)
        if "cython" in impls:
            speed = f"{times['python'] / times['cython']:>8.1f}x"
            diff = f"{np.max(np.abs(outs['python'] - outs['cython'])):>10.1e}"
        else:
            speed, diff = f"{'n/a':>9}", f"{'n/a':>10}"
        print(f"{name:<6} {cells} {speed} {diff}")


if __name__ == "__main__":
    main()
