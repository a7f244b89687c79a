"""Time the numba and numpy flavours of each hot kernel on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs once untimed first so numba compilation is excluded.  Both
flavours must agree on a check input or the script exits non-zero.  For Phi
the check uses 10 iterations: near a saddle, round-off differences between
the two summation orders grow geometrically, so long runs may part ways.
"""
import argparse
import sys
import time

import numpy as np

from medianlab import kernels
from medianlab._accel import HAS_NUMBA
from medianlab.core import hypercube, path, product
from medianlab.dynamics import tree_model


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    T_scan = tree_model(2, with_sign=True).table  # 34 points, 34^5 five-tuples
    T_phi = product(path(3), hypercube(2)).table
    rng = np.random.default_rng(0)
    etas = rng.integers(0, 1001, size=(200, T_phi.shape[0])).astype(float)
    etas /= etas.sum(axis=1, keepdims=True)
    steps = rng.integers(0, 8, size=(50_000, 200), dtype=np.uint8)
    start = np.full((50_000, 4), -1, dtype=np.int8)
    lengths = np.zeros(50_000, np.int64)
    return [
        ("axiom scan, n=34", kernels.axiom_scan_jit, kernels.axiom_scan_numpy, (T_scan,), None),
        ("Phi x300, 200 starts, n=12", kernels.phi_iterate_jit, kernels.phi_iterate_numpy,
         (T_phi, etas, 300), (T_phi, etas, 10)),
        ("walk 50k x 200 steps", kernels.walk_block_jit, kernels.walk_block_numpy,
         (steps, start, lengths, 4), None),
    ]


def same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(x, y, rtol=0, atol=1e-12) for x, y in zip(a, b))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not HAS_NUMBA:
        print("numba is not importable; only the numpy flavour exists")
        return 1
    print(f"{'kernel':<30} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    ok = True
    for name, jit, ref, inputs, check in cases():
        check = check or inputs
        if not same(jit(*check), ref(*check)):
            print(f"{name}: flavours disagree")
            ok = False
            continue
        tj = best_of(lambda: jit(*inputs), args.repeat)
        tn = best_of(lambda: ref(*inputs), args.repeat)
        print(f"{name:<30} {tj:>10.4f} {tn:>10.4f} {tn / tj:>7.1f}x")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
