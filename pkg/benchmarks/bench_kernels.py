"""Times the numba and pure-numpy paths of the batched oracle kernels.

Run: python3 benchmarks/bench_kernels.py [--samples N] [--features M]
The module-level dispatch (env flag ASBOX_DISABLE_NUMBA) is bypassed here;
both implementations are called directly so one process covers both.
"""

import argparse
import time

import numpy as np

import asbox._kernels as kernels
from asbox.data_io import synthetic_logistic_dataset


def timeit(fn, repeats=5):
    fn()  # warm-up (and numba compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=8000)
    parser.add_argument("--features", type=int, default=112)
    parser.add_argument("--batch", type=int, default=2000)
    parser.add_argument("--hidden", type=int, default=16)
    args = parser.parse_args()

    ds = synthetic_logistic_dataset(args.samples, args.features, seed=0,
                                    density=0.2)
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, args.features)
    rows = rng.integers(0, args.samples, args.batch).astype(np.int64)
    scale = np.full(args.batch, 1.0 / args.batch)
    y01 = (ds.labels + 1.0) / 2.0
    h = args.hidden
    w1 = rng.uniform(-1, 1, (h, args.features))
    b1 = rng.uniform(-1, 1, h)
    w2 = rng.uniform(-1, 1, h)
    b2 = 0.1

    cases = [
        ("logistic value+grad",
         lambda: kernels.logistic_batch_value_grad_numpy(
             ds.indptr, ds.indices, ds.values, ds.labels, x, rows, scale),
         lambda: kernels.logistic_batch_value_grad_numba(
             ds.indptr, ds.indices, ds.values, ds.labels, x, rows, scale)
         if kernels.NUMBA_ENABLED else None),
        ("nn value+grad",
         lambda: kernels.nn_batch_value_grad_numpy(
             ds.indptr, ds.indices, ds.values, y01, w1, b1, w2, b2, rows,
             scale),
         lambda: kernels.nn_batch_value_grad(
             ds.indptr, ds.indices, ds.values, y01, w1, b1, w2, b2, rows,
             scale) if kernels.NUMBA_ENABLED else None),
    ]

    print(f"batch={args.batch} of {args.samples}x{args.features}, "
          f"hidden={h}, numba={'on' if kernels.NUMBA_ENABLED else 'OFF'}")
    print(f"{'kernel':24} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, numpy_fn, numba_fn in cases:
        t_np = timeit(numpy_fn)
        if kernels.NUMBA_ENABLED:
            t_nb = timeit(numba_fn)
            print(f"{name:24} {t_np * 1e3:10.3f}ms {t_nb * 1e3:10.3f}ms "
                  f"{t_np / t_nb:8.1f}x")
        else:
            print(f"{name:24} {t_np * 1e3:10.3f}ms {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
