"""Time the compiled and pure-Python kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one CSV row per (kernel, backend) with the best wall time and the
speedup of the compiled core over the fallback.
"""

import argparse
import csv
import sys
import time

import numpy as np

from gramnorm import _kernels


def cases(rng):
    K = rng.standard_normal((8, 8, 3, 3))
    X = rng.standard_normal((8, 32, 32))
    D = rng.standard_normal((32 * 32, 8, 8)) + 1j * rng.standard_normal((32 * 32, 8, 8))
    G = rng.standard_normal((4, 4, 9, 9))
    return [
        ("gram_correlate 4x4x9x9", lambda: _kernels.gram_correlate(G)),
        ("block_gram_logs 1024x8x8 t=6", lambda: _kernels.block_gram_logs(D, 6, 0)),
        ("conv2d 8x8x3x3 n=32 zero", lambda: _kernels.conv2d(K, X, False)),
        ("conv2d 8x8x3x3 n=32 circular", lambda: _kernels.conv2d(K, X, True)),
        ("conv2d_transpose 8x8x3x3 n=32", lambda: _kernels.conv2d_transpose(K, X, False)),
    ]


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is available", file=sys.stderr)
    rng = np.random.default_rng(0)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["kernel", "backend", "best_ms", "speedup_vs_python"])
    previous = _kernels.backend()
    try:
        for name, fn in cases(rng):
            timings = {}
            for b in backends:
                _kernels.use_backend(b)
                timings[b] = best_time(fn, args.repeat)
            for b, t in timings.items():
                w.writerow([name, b, f"{t * 1e3:.3f}", f"{timings['python'] / t:.2f}"])
    finally:
        _kernels.use_backend(previous)


if __name__ == "__main__":
    main()
