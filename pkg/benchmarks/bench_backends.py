#!/usr/bin/env python3
"""Compare the compiled trajectory kernel against the numpy fallback.

Times raw ensemble generation (the hot loop) and the end-to-end
characteristic-function estimate for a few switching-rate regimes, and
verifies on the fly that both backends return the same ensembles.

Usage: python benchmarks/bench_backends.py [--trajectories N] [--repeats R]
"""

import argparse
import time

import numpy as np

from rtnqubit.montecarlo import TrajectoryConfig, available_backends, mc_sample
from rtnqubit.montecarlo import characteristic_from_ensemble
from rtnqubit.noise import SwitchingRates

CASES = [
    ("sparse switching", SwitchingRates(0.5, 0.5), 2.0),
    ("moderate", SwitchingRates(1.0, 3.0), 5.0),
    ("dense switching", SwitchingRates(10.0, 10.0), 5.0),
    ("strong imbalance", SwitchingRates(0.2, 20.0), 5.0),
]


def time_backend(backend, rates, horizon, trajectories, repeats, seed):
    cfg = TrajectoryConfig(trajectories, seed, horizon)
    best_gen = float("inf")
    best_total = float("inf")
    ensemble = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        ensemble = mc_sample(rates, cfg, backend=backend)
        t1 = time.perf_counter()
        characteristic_from_ensemble(ensemble, 2, horizon)
        t2 = time.perf_counter()
        best_gen = min(best_gen, t1 - t0)
        best_total = min(best_total, t2 - t0)
    return best_gen, best_total, ensemble


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trajectories", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}   trajectories: {args.trajectories}")
    header = f"{'case':<18}{'backend':<10}{'events':>10}{'gen [ms]':>10}{'total [ms]':>12}{'Mevents/s':>11}"
    print(header)
    print("-" * len(header))
    for name, rates, horizon in CASES:
        results = {}
        for backend in backends:
            gen, total, ens = time_backend(
                backend, rates, horizon, args.trajectories, args.repeats, args.seed
            )
            events = ens.switch_times.size
            results[backend] = (gen, total, ens)
            print(
                f"{name:<18}{backend:<10}{events:>10}{gen * 1e3:>10.1f}"
                f"{total * 1e3:>12.1f}{events / gen / 1e6:>11.1f}"
            )
        if len(backends) == 2:
            a, b = (results[k][2] for k in backends)
            assert np.array_equal(a.offsets, b.offsets), "backend mismatch: counts"
            assert np.max(np.abs(a.switch_times - b.switch_times)) < 1e-12
            speedup = results["python"][0] / results["compiled"][0]
            print(f"{'':<18}generation speedup (compiled vs python): {speedup:.2f}x")
    print("\nboth backends verified to produce matching ensembles")


if __name__ == "__main__":
    main()
