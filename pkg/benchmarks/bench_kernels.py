"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 20]

Each kernel is run once untimed so JIT compilation is excluded, and the two
paths are checked to agree before timing.
"""
import argparse
import timeit

import numpy as np

from tunnelforce import _accel
from tunnelforce.quadrature import GAUSS_W, KRONROD_W


def _cases(rng):
    k = np.sqrt(rng.uniform(0.0, 2.0, 20000) + 1e-6j)
    stack = (k, 0.0, np.array([-2.0, 0.0, -2.0]), np.array([8.0, 0.5, 8.0]), 0.0)

    spacing = np.full(40001, 0.005)
    cell_v = np.where(np.arange(40001) % 10000 < 5000, -2.0, 0.0)
    fd = (spacing, cell_v)

    fx = rng.standard_normal((20000, 15))
    half = rng.uniform(1e-3, 1e-1, 20000)
    gk = (fx, half, KRONROD_W, GAUSS_W)
    return {
        "stack_parts": (_accel.stack_parts_numba, _accel.stack_parts_numpy, stack),
        "fd_tridiagonal": (_accel.fd_tridiagonal_numba, _accel.fd_tridiagonal_numpy, fd),
        "gk_panels": (_accel.gk_panels_numba, _accel.gk_panels_numpy, gk),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    print(f"{'kernel':<16}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, (fast, slow, inputs) in _cases(rng).items():
        a = fast(*inputs)
        b = slow(*inputs)
        for x, y in zip(a, b):
            np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-14)
        t_fast = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        print(f"{name:<16}{1e3 * t_fast:>12.3f}{1e3 * t_slow:>12.3f}{t_slow / t_fast:>10.2f}")


if __name__ == "__main__":
    main()
