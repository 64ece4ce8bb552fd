"""Times each hot kernel on its jitted and pure-numpy builds.

Run:  python benchmarks/bench_kernels.py [--repeat 5]
Needs numba importable; the numpy path is always available.
"""

import argparse
import time

import numpy as np

from heterosum._kernels import IMPLEMENTATIONS, NUMBA_ENABLED


def bench(fn, args, repeat):
    fn(*args)  # warm (JIT compile / cache load)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _transition(rng, n):
    w = rng.random((n, n))
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0)
    rowsum = w.sum(axis=1)
    return (w / rowsum[:, None]).T.copy()


def make_cases(rng):
    a = rng.integers(0, 50, size=3000).astype(np.int32)
    b = rng.integers(0, 50, size=3000).astype(np.int32)

    x = rng.random((250, 16))
    sq = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2) / 2.0
    cost = sq.copy()
    cost[np.tril_indices(250)] = np.inf

    s1 = rng.integers(0, 12, size=600).astype(np.int32)
    s2 = rng.integers(0, 12, size=600).astype(np.int32)

    # n=30 mirrors a typical per-document graph; n=400 a whole large group
    return {
        "rank_iterate:30": ("rank_iterate", (_transition(rng, 30), 0.85, 1e-10, 300)),
        "rank_iterate:400": ("rank_iterate", (_transition(rng, 400), 0.85, 1e-10, 300)),
        "lcs_table": ("lcs_table", (a, b)),
        "ward_merge": ("ward_merge", (cost, 1e9)),
        "block_matches": ("block_matches", (s1, s2)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not NUMBA_ENABLED:
        print("numba unavailable or disabled (HETEROSUM_NO_NUMBA); nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    cases = make_cases(rng)
    print(f"{'kernel':<18} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}")
    for label, (name, case_args) in cases.items():
        impls = IMPLEMENTATIONS[name]
        t_np = bench(impls["numpy"], case_args, args.repeat)
        t_nb = bench(impls["numba"], case_args, args.repeat)
        print(f"{label:<18} {t_np:>12.5f} {t_nb:>12.5f} {t_np / t_nb:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
