"""Compare the numba and numpy kernels on the sizes the package actually uses.

Run with ``python3 benchmarks/bench_kernels.py``. Times are the best of
several repeats after one warm-up call (which also triggers JIT compilation).
"""

import argparse
import time

import numpy as np

from crstates import _kernels
from crstates.constructors import werner
from crstates.reducibility import decompose
from crstates.state import random_state


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    for k in (4, 9, 16):
        mat = cplx(k * k, k * k)
        yield f"partial_transpose k=m={k}", "partial_transpose", (mat, k, k)
        yield f"realign k={k}", "realign", (mat, k)
    # K = k^n is the local dimension of the shuffle; sigma is K^2 x K^2
    for K, trials in ((3, 1000), (9, 1000), (27, 100)):
        sigma = cplx(K * K, K * K)
        yield f"quadratic_forms K={K} trials={trials}", "quadratic_forms", (sigma, cplx(trials, K * K))
        yield f"compress_batch K={K} trials={trials}", "compress_batch", (sigma, cplx(trials, K, 2))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels.NUMBA_KERNELS is None:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<40}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for label, name, fargs in cases(rng):
        t_np = best_of(lambda: getattr(_kernels.NUMPY_KERNELS, name)(*fargs), args.repeat)
        t_nb = best_of(lambda: getattr(_kernels.NUMBA_KERNELS, name)(*fargs), args.repeat)
        print(f"{label:<40}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.2f}")

    # for scale: the decision itself is dominated by LAPACK eigensolves
    for k in (3, 4):
        g = random_state(k, k, k, 1)
        t = best_of(lambda: decompose(g), args.repeat)
        print(f"{'decompose k=m=' + str(k) + ' (LAPACK bound)':<40}{t * 1e3:>12.3f}")
    w = werner(3, 1, -1, 1)
    t = best_of(lambda: decompose(w), args.repeat)
    print(f"{'decompose werner k=3':<40}{t * 1e3:>12.3f}")


if __name__ == "__main__":
    main()
