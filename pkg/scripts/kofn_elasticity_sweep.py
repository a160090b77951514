#!/usr/bin/env python3
"""Sweep the k-out-of-n elasticity properties across all index combinations
up to a chosen size and print the worst observed margins."""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

try:
    import coherent_age  # noqa: F401
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from coherent_age import Grid, check_monotone, check_sign, kofn_distortion


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=6)
    parser.add_argument("--grid-size", type=int, default=2001)
    parser.add_argument("--slack", type=float, default=1e-8)
    args = parser.parse_args()

    grid = Grid.probability(1e-3, args.grid_size)
    pairs = [(k, n) for n in range(1, args.max_n + 1) for k in range(1, n + 1)]
    dists = {kn: kofn_distortion(*kn) for kn in pairs}

    start = time.perf_counter()
    worst = {"H-sign": 0.0, "H-mono": 0.0, "R-sign": 0.0, "R-mono": 0.0,
             "H-ratio": 0.0, "R-ratio": 0.0}
    for kn, d in dists.items():
        def g_h(p, d=d):
            return (1 - p) * np.asarray(d.H_prime(p)) / np.asarray(d.H(p))

        def g_r(p, d=d):
            return p * np.asarray(d.R_prime(p)) / np.asarray(d.R(p))

        worst["H-sign"] = max(worst["H-sign"], check_sign(g_h, grid, "nonpositive", args.slack).violation)
        worst["H-mono"] = max(worst["H-mono"], check_monotone(g_h, grid, "decr", args.slack).violation)
        worst["R-sign"] = max(worst["R-sign"], check_sign(g_r, grid, "nonnegative", args.slack).violation)
        worst["R-mono"] = max(worst["R-mono"], check_monotone(g_r, grid, "decr", args.slack).violation)

    checks = 0
    for k, n in pairs:
        for l, m in pairs:
            d1, d2 = dists[(k, n)], dists[(l, m)]
            if k <= l and m - l <= n - k:
                v = check_monotone(lambda p: np.asarray(d1.H(p)) / np.asarray(d2.H(p)),
                                   grid, "decr", args.slack)
                worst["H-ratio"] = max(worst["H-ratio"], v.violation)
                checks += 1
            if l <= k and n - k <= m - l:
                v = check_monotone(lambda p: np.asarray(d1.R(p)) / np.asarray(d2.R(p)),
                                   grid, "incr", args.slack)
                worst["R-ratio"] = max(worst["R-ratio"], v.violation)
                checks += 1

    elapsed = time.perf_counter() - start
    print(f"index pairs: {len(pairs)}, ratio checks: {checks}, slack: {args.slack:g}, "
          f"grid: {args.grid_size} pts, time: {elapsed:.1f}s")
    for name, value in worst.items():
        status = "ok" if value <= args.slack else "VIOLATION"
        print(f"  {name:8s} worst {value:+.3e}  {status}")


if __name__ == "__main__":
    main()
