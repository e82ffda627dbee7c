"""Timing comparison of the numba and numpy kernel backends.

Both variants of every kernel are importable side by side regardless of
the FEEDBACK_LAB_NUMBA selection flag, so one process can time them
against each other on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from feedback_lab import kernels
from feedback_lab._accel import HAS_NUMBA

GUARD = 1e150


def lipschitz_anchors(seed, n, L, span=10.0):
    rng = np.random.default_rng(seed)
    xs = np.sort(rng.uniform(-span, span, n))
    vs = np.empty(n)
    vs[0] = rng.uniform(-1, 1)
    for i in range(1, n):
        vs[i] = vs[i - 1] + rng.uniform(-L, L) * (xs[i] - xs[i - 1])
    return xs, vs


def workloads():
    rng = np.random.default_rng(0)
    w = rng.standard_normal(5001)
    yield ("parametric_episode (T=5000)",
           "parametric_episode",
           (0.0, 1.3, w, 1.0, 3.5, 1.0, 1.0, GUARD))

    xs, vs = lipschitz_anchors(1, 16, 2.0)
    raw = rng.uniform(-1, 1, 5001)
    yield ("nonparam_fixed (T=5000, NN scan)",
           "nonparam_fixed",
           (0.3, xs, vs, 2.0, 0, raw, 1.0, 0.1, 0.0, GUARD, 1))

    yield ("nonparam_duel (T=500)",
           "nonparam_duel",
           (0.4, 6.0, 1.0, 10.0, 0.1, 0.0, GUARD, 500, 1))

    xs1, vs1 = lipschitz_anchors(2, 17, 1.0, span=20.0)
    yield ("sampled_fixed (1000 periods x 64 substeps)",
           "sampled_fixed",
           (0.7, xs1, vs1, 1.0, 0, 1.0, 0.5, 64, 4.0, 1000, GUARD, 1))

    yield ("sampled_duel (13 periods, eval commits)",
           "sampled_duel",
           (0.0, 1.0, 1.0, 8.0, 64, 4.0, 13, GUARD, 1, 13 * 257 + 4))

    A = rng.standard_normal((3, 3, 3)) * 0.3
    B = rng.standard_normal((3, 3, 2))
    Kg = rng.standard_normal((3, 2, 3)) * 0.1
    P = np.full((3, 3), 1.0 / 3.0)
    W = rng.standard_normal((5000, 3))
    mu = rng.random(5000)
    yield ("mjls_episode (T=5000, N=3, n=3)",
           "mjls_episode",
           (A, B, Kg, P, np.zeros(3), 0, mu, W, GUARD, 1))

    A2 = np.array([[[0.0]], [[1.99]]])
    B2 = np.ones((2, 1, 1))
    P2 = np.full((2, 2), 0.5)
    yield ("riccati_solve (near-boundary, scalar 2-mode)",
           "riccati_solve",
           (A2, B2, P2, 1e-10, 10000, 1e12, 1e-10))


def time_call(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions, best-of is reported")
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba unavailable: the 'numba' column is the plain Python body")

    rows = []
    for label, name, call_args in workloads():
        fn_nb, fn_np = kernels.VARIANTS[name]
        fn_nb(*call_args)  # JIT warm-up outside the timed region
        fn_np(*call_args)
        t_nb = time_call(fn_nb, call_args, args.repeat)
        t_np = time_call(fn_np, call_args, args.repeat)
        rows.append((label, t_nb, t_np))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel workload':<{width}}  {'numba':>10}  {'numpy':>10}  "
          f"{'speedup':>8}")
    for label, t_nb, t_np in rows:
        print(f"{label:<{width}}  {t_nb * 1e3:>8.2f}ms  {t_np * 1e3:>8.2f}ms  "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
