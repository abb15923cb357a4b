"""Timing comparison of the compiled and pure-numpy kernel backends.

Runs the three kernel entry points (mix_batch, bettor_run, experts_run) on
representative workloads against both backends and prints a small table.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from coinbet import numerics
from coinbet._kernels import _ref

try:
    from coinbet._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rule = numerics.gauss_legendre(64)
    nodes, weights = rule.nodes, rule.weights
    rng = np.random.default_rng(0)

    T = 2000
    inv2sig = float(T)  # sigma^2 = 1/(2T)
    xs = rng.uniform(-T, T, 10_000)
    vs = rng.uniform(0, T, 10_000)
    coins = rng.uniform(-1, 1, T)
    losses = rng.random((T, 50))
    pi = np.full(50, 1.0 / 50)

    cases = [
        ("mix_batch (10k queries)",
         lambda mod: mod.mix_batch(xs, vs, inv2sig, nodes, weights)),
        ("bettor_run (T=2000)",
         lambda mod: mod.bettor_run(coins, inv2sig, True, nodes, weights)),
        ("experts_run (T=2000, d=50)",
         lambda mod: mod.experts_run(losses, pi, inv2sig, True, nodes, weights)),
    ]

    print(f"{'case':<28} {'numpy _ref':>12} {'cython _fast':>12} {'speedup':>9}")
    for name, call in cases:
        t_ref = _time(lambda: call(_ref), args.repeat)
        if _fast is None:
            print(f"{name:<28} {t_ref * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
            continue
        t_fast = _time(lambda: call(_fast), args.repeat)
        print(f"{name:<28} {t_ref * 1e3:>10.2f}ms {t_fast * 1e3:>10.2f}ms "
              f"{t_ref / t_fast:>8.1f}x")
        out_ref = call(_ref)
        out_fast = call(_fast)
        worst = max(
            float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
            for a, b in zip(out_ref, out_fast)
        )
        print(f"{'':<28} max |ref - fast| = {worst:.3e}")


if __name__ == "__main__":
    main()
