"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Run:  python benchmarks/compare_backends.py [--samples N]

Both backends consume identical pre-drawn random arrays, so the comparison
is apples to apples; outputs are also cross-checked here.
"""

import argparse
import time

import numpy as np

from vrjp._kernels import pure

try:
    from vrjp._kernels import _compiled as compiled
except ImportError:
    compiled = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=100_000)
    args = parser.parse_args()
    n_samples = args.samples
    rng = np.random.default_rng(0)

    n = 5
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = rng.uniform(0.5, 2.0)
    w[0, n - 1] = w[n - 1, 0] = 1.0
    order = np.arange(n, dtype=np.int64)
    steps = 40

    cases = [
        ("ig_transform", "ig_transform",
         (rng.random(n_samples) * 3, 1.0, rng.standard_normal(n_samples),
          rng.random(n_samples))),
        ("beta_eliminate", "beta_eliminate",
         (w, order, rng.standard_normal((n_samples, n)),
          rng.random((n_samples, n)))),
        ("chain_paths", "chain_paths",
         (np.cumsum(w, axis=1), 0, rng.random((n_samples, steps)))),
        ("vrjp_paths", "vrjp_paths",
         (w, 0, rng.random((n_samples, steps)),
          rng.random((n_samples, steps)))),
        ("errw_paths", "errw_paths",
         (w, 0, rng.random((n_samples, steps)))),
    ]

    print(f"samples={n_samples}, graph n={n}, steps={steps}")
    print(f"{'kernel':<16}{'pure':>12}{'compiled':>12}{'speedup':>10}")
    for label, name, call_args in cases:
        t_pure, out_pure = timeit(getattr(pure, name), *call_args)
        if compiled is None:
            print(f"{label:<16}{t_pure * 1e3:>10.1f}ms{'n/a':>12}{'':>10}")
            continue
        t_comp, out_comp = timeit(getattr(compiled, name), *call_args)
        a = out_pure[0] if isinstance(out_pure, tuple) else out_pure
        b = out_comp[0] if isinstance(out_comp, tuple) else out_comp
        agree = np.allclose(a, b, rtol=1e-12, atol=0)
        print(f"{label:<16}{t_pure * 1e3:>10.1f}ms{t_comp * 1e3:>10.1f}ms"
              f"{t_pure / t_comp:>9.1f}x  agree={agree}")


if __name__ == "__main__":
    main()
