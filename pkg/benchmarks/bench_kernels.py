"""Compare the compiled kernels against the pure-numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 1024 4096 16384]

Each kernel is timed on identical inputs with both backends and the
results are checked for agreement before timings are printed.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from korovkin import _kernels_py

try:
    from korovkin import _kernels as compiled
except ImportError:
    compiled = None


def cases(size: int, rng: np.random.Generator):
    walk = np.cumsum(rng.normal(size=size))
    window = max(1, size // 20)
    yield "sliding_extrema", (walk, window)
    cells = min(size, 2048)
    prefix = np.concatenate([[0.0], np.cumsum(rng.uniform(0.0, 1.0, cells))])
    yield "interval_power_sup", (prefix, 1.0 / cells, 1.0 / 3.0 - 0.5, 0.5)
    weights = rng.uniform(0.1, 10.0, cells)
    pw = np.concatenate([[0.0], np.cumsum(weights)]) / cells
    pd = np.concatenate([[0.0], np.cumsum(1.0 / weights)]) / cells
    yield "muckenhoupt_sup", (pw, pd, 1.0 / cells, 2.0)


def agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(agree(x, y) for x, y in zip(a, b))
    return bool(np.allclose(a, b, rtol=1e-12, atol=0.0))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--sizes", type=int, nargs="+", default=[1024, 4096, 16384])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20} {'size':>7} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for size in args.sizes:
        for name, call_args in cases(size, rng):
            py, cy = getattr(_kernels_py, name), getattr(compiled, name)
            if not agree(py(*call_args), cy(*call_args)):
                print(f"{name}: backends disagree at size {size}", file=sys.stderr)
                return 2
            t_py = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat)) * 1e3
            t_cy = min(timeit.repeat(lambda: cy(*call_args), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<20} {size:>7} {t_py:>12.3f} {t_cy:>12.3f} {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
