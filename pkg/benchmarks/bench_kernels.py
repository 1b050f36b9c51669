"""Timing comparison of the numba and pure-numpy kernel builds.

Run twice, once per backend (the flag must be set before import):

    python benchmarks/bench_kernels.py
    CUSPMASS_NO_NUMBA=1 python benchmarks/bench_kernels.py

Each kernel is warmed once (JIT compilation) and then timed over repeated
calls on fixed inputs, so the two runs are directly comparable.
"""

import time

import numpy as np

import cuspmass
from cuspmass import kernels
from cuspmass.arith import prime_sieve
from cuspmass.coeffcore import delta_table


def timeit(label, fn, repeats=5):
    fn()  # warm-up / JIT
    t0 = time.perf_counter()
    for _ in range(repeats):
        out = fn()
    dt = (time.perf_counter() - t0) / repeats
    print(f"{label:34s} {dt * 1e3:9.2f} ms/call")
    return out


def main():
    print(f"backend: {cuspmass.backend_name()}")
    rng = np.random.default_rng(7)

    xs = rng.uniform(0.3, 40.0, size=20_000)
    timeit("kbessel_imag r=5, 20k args", lambda: kernels.kbessel_imag(5.0, xs))
    timeit("kbessel_real nu=0.3, 20k args", lambda: kernels.kbessel_real(0.3, xs))

    table = delta_table(30_000)
    px = rng.uniform(-0.5, 0.5, size=20_000)
    py = rng.uniform(0.05, 3.0, size=20_000)
    timeit(
        "holo_fourier k=12, 20k points",
        lambda: kernels.holo_fourier(table.lam, 12, px, py, 800),
    )

    ys = rng.uniform(0.005, 0.2, size=256)
    timeit(
        "holo_pair_sums l=1, 20k terms",
        lambda: kernels.holo_pair_sums(table.lam, 12, 1, ys, 1, 20_000),
    )

    primes = prime_sieve(10)
    timeit("zparts to 2e5", lambda: kernels.zparts(200_000, 4, primes))


if __name__ == "__main__":
    main()
