"""Time the compiled fold kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one row per kernel: best-of-N wall time for each backend and the
speedup. Results are checked for bit equality before timing.
"""
import argparse
import sys
import timeit

import numpy as np

from varlp import kernels
from varlp.embeddings import universal_exponents


def cases(rng):
    n = 100_000
    mags = np.abs(rng.normal(size=n))
    exps = rng.uniform(1.0, 6.0, n)
    rows = np.abs(rng.normal(size=(20_000, 6)))
    rexp = rng.uniform(1.0, 4.0, 6)
    inv_p = universal_exponents().inverse_values(1, 1_000_001)
    return {
        "fold (1e5 coords)": lambda b: b.fold(mags, exps),
        "fold_running (1e5)": lambda b: b.fold_running(mags, exps),
        "fold_rows (2e4 x 6)": lambda b: b.fold_rows(rows, rexp),
        # a near-miss target: the scan runs deep before the first hit
        "first_admissible (1e6)": lambda b: b.first_admissible(inv_p, 0.0, 1.0005),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    if not kernels.compiled_available():
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    py, cy = kernels.python_backend, kernels.compiled_backend
    rng = np.random.default_rng(0)

    print(f"{'kernel':<26}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, call in cases(rng).items():
        a, b = call(py), call(cy)
        assert np.array_equal(np.asarray(a), np.asarray(b)), name
        t_py = min(timeit.repeat(lambda: call(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: call(cy), number=1, repeat=args.repeat))
        print(f"{name:<26}{t_py:>12.4f}{t_cy:>12.5f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
