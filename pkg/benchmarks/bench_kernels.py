"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--N 1024 2048 4096] [--repeat 5]

Prints one row per (kernel, N) with the best-of-repeat wall time of each backend
and the speedup. Outputs of the two backends are compared on every row.
"""

import argparse
import timeit

import numpy as np

from hqmap import BACKEND, _backend


def _inputs(n, seed=0):
    r = np.random.default_rng(seed)
    t = 2 * np.pi * np.arange(n) / n
    v = np.exp(1j * t) * (1 + 0.1 * np.cos(5 * t)) + 0.01 * r.standard_normal(n)
    d = 1j * v
    offsets = np.concatenate((-np.arange(1, n // 2, 2)[::-1], np.arange(1, n // 2, 2)))
    w = 1.0 / offsets.astype(float) ** 2
    pos = offsets[offsets > 0]
    return {
        "lag_oscillation": (_backend.lag_oscillation, (v, True)),
        "chord_arc_lags": (_backend.chord_arc_lags, (v,)),
        "odd_difference_sum": (_backend.odd_difference_sum, (v, pos, w[offsets > 0])),
        "jacobian_sum": (_backend.jacobian_sum, (v, d, offsets, w)),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, nargs="+", default=[1024, 2048, 4096])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if BACKEND != "compiled":
        print("compiled kernels are not built; timing the fallback only")
    print(f"{'kernel':<20} {'N':>6} {'compiled [ms]':>14} {'python [ms]':>12} {'speedup':>8}  match")
    for n in args.N:
        for name, (fn, fargs) in _inputs(n).items():
            py = min(timeit.repeat(lambda: fn(*fargs, backend="python"), number=1, repeat=args.repeat))
            if BACKEND == "compiled":
                cc = min(timeit.repeat(lambda: fn(*fargs, backend="compiled"), number=1, repeat=args.repeat))
                ok = _same(fn(*fargs, backend="compiled"), fn(*fargs, backend="python"))
                print(f"{name:<20} {n:>6} {1e3 * cc:>14.3f} {1e3 * py:>12.3f} {py / cc:>8.1f}  {ok}")
            else:
                print(f"{name:<20} {n:>6} {'-':>14} {1e3 * py:>12.3f} {'-':>8}  -")


if __name__ == "__main__":
    main()
