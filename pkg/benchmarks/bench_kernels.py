"""Time the numba kernels against their numpy fallbacks and check they agree.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from semirandom import _kernels as K
from semirandom.oracle import DOUBLE_K4_MULTS, HitDP
from semirandom.process import _raw_block


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    n, r = 2000, 3
    raw = _raw_block(rng, n, r, 200_000)
    codes = rng.integers(0, 50_000, size=200_000)
    dp = HitDP(DOUBLE_K4_MULTS, 150 * 149 // 2)
    cur = np.zeros(dp.num_states)
    cur[0] = 1.0
    nxt = dp.transitions()
    adj = rng.random((120, 120)) < 0.3
    adj = np.triu(adj, 1)
    adj = adj | adj.T
    return {
        "floyd_resolve (200k draws)": (lambda: K.floyd_resolve_np(raw, n), lambda: K.floyd_resolve(raw, n)),
        "count_duplicates (200k codes)": (lambda: K.count_duplicates_np(codes), lambda: K.count_duplicates(codes)),
        "dp_run (1024 states, 3000 steps)": (lambda: K.dp_run_np(cur, nxt, 1 / dp.N, 3000),
                                             lambda: K.dp_run(cur, nxt, 1 / dp.N, 3000)),
        "count_k4 (120 vertices)": (lambda: K.count_k4_np(adj), lambda: K.count_k4(adj)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba active: {K.USE_NUMBA}")
    print(f"{'kernel':36s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}  agree")
    for name, (slow, fast) in cases().items():
        fast()  # compile outside the timing
        t_np, a = best_of(slow, args.repeat)
        t_nb, b = best_of(fast, args.repeat)
        agree = np.allclose(a, b, rtol=1e-12, atol=0) if isinstance(a, np.ndarray) else a == b
        print(f"{name:36s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}  {agree}")


if __name__ == "__main__":
    main()
