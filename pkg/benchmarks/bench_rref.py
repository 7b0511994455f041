"""Compare the compiled and pure-Python elimination kernels.

Run: python benchmarks/bench_rref.py [--sizes 8 16 32 64] [--repeat 50]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from subalg.numcore import DEFAULT_TOL, canonical_columns, rref_backend


def bench(n: int, repeat: int, rng: np.random.Generator) -> tuple[float, float, float]:
    m = rng.standard_normal((n, n // 2)) + 1j * rng.standard_normal((n, n // 2))
    py = min(timeit.repeat(lambda: canonical_columns(m, DEFAULT_TOL, "python"), number=1, repeat=repeat))
    cc = min(timeit.repeat(lambda: canonical_columns(m, DEFAULT_TOL, "compiled"), number=1, repeat=repeat))
    gap = float(np.abs(canonical_columns(m, DEFAULT_TOL, "python")
                       - canonical_columns(m, DEFAULT_TOL, "compiled")).max())
    return py, cc, gap


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if rref_backend() != "compiled":
        raise SystemExit("compiled kernel not built; run pip install -e . --no-build-isolation")
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>5} {'python ms':>10} {'compiled ms':>12} {'speedup':>8} {'max gap':>9}")
    for n in args.sizes:
        py, cc, gap = bench(n, args.repeat, rng)
        print(f"{n:>5} {py * 1e3:>10.3f} {cc * 1e3:>12.3f} {py / cc:>8.2f} {gap:>9.1e}")


if __name__ == "__main__":
    main()
