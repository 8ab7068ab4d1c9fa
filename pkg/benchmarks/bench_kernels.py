"""Compare the compiled classification kernel against the pure-Python path.

Runs classify_grid twice per case (backend="python" and "compiled"),
checks the outputs are identical, and reports wall times.  Usage:

    python benchmarks/bench_kernels.py [--resolution 256] [--repeat 3]
"""

import argparse
import time

import numpy as np

from fastescape.functions import make_builtin
from fastescape.growth import build_ladder, find_min_R
from fastescape.raster import KERNEL_BACKEND, classify_grid


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--resolution", type=int, default=256)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if KERNEL_BACKEND != "compiled":
        parser.error("compiled kernel extension is not built; nothing to compare")

    exp = make_builtin("exp")
    cosh = make_builtin("cosh_sq")
    quarter = make_builtin("quarter_order")
    sinh = make_builtin("sinh_plus_sq")
    r_quarter = find_min_R(quarter)
    cases = [
        (exp, build_ladder(exp, 1.0, 16), (0j, 4.0, 4.0), 8),
        (cosh, build_ladder(cosh, 1.0, 20), (0j, 2.0, 2.0), 12),
        (quarter, build_ladder(quarter, r_quarter, 11), (0j, 2e4, 2e4), 3),
        (sinh, build_ladder(sinh, 5.0, 16), (0j, 4.0, 4.0), 8),
    ]

    res = (args.resolution, args.resolution)
    print(f"{'function':<14} {'grid':<10} {'N':>3} {'python':>9} {'compiled':>9} {'speedup':>8}")
    for f, ladder, box, N in cases:
        t_py, grid_py = best_time(
            lambda: classify_grid(f, ladder, box, res, N, backend="python"), args.repeat
        )
        t_cc, grid_cc = best_time(
            lambda: classify_grid(f, ladder, box, res, N, backend="compiled"), args.repeat
        )
        if not (
            np.array_equal(grid_py.level, grid_cc.level)
            and np.array_equal(grid_py.indeterminate, grid_cc.indeterminate)
        ):
            print(f"{f.name}: BACKEND MISMATCH")
            return 1
        print(
            f"{f.name:<14} {res[0]}x{res[1]:<6} {N:>3} {t_py:>8.3f}s {t_cc:>8.3f}s "
            f"{t_py / t_cc:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
