"""Verdict tallies and timings on seeded oracle pairs.

    python3 scripts/oracle_benchmark.py --dims 2,2,2 --pairs 100 [--profile 2,2,2,2] [--shift 1e-3] [--pt none]
"""

import argparse
import collections
import time

import numpy as np

from lueq import CheckConfig, Verdict, check_equivalence, random_pair


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", default="2,2")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--profile")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--pt", default="auto", help="auto, none, or a 1-based subsystem")
    p.add_argument("--seed0", type=int, default=0)
    args = p.parse_args()

    dims = [int(x) for x in args.dims.split(",")]
    profile = [int(x) for x in args.profile.split(",")] if args.profile else None
    pt = {"auto": "auto", "none": None}.get(args.pt)
    if pt is None and args.pt not in ("none",):
        pt = [int(args.pt) - 1]
    cfg = CheckConfig(pt=pt)

    tally = collections.Counter()
    times, residuals = [], []
    for seed in range(args.seed0, args.seed0 + args.pairs):
        S1, S2, _ = random_pair(dims, seed, profile, shift=args.shift)
        t0 = time.perf_counter()
        v = check_equivalence(S1, S2, cfg)
        times.append(time.perf_counter() - t0)
        tally[v.kind] += 1
        if v.kind is Verdict.EQUIVALENT:
            residuals.append(v.residual)
    print(f"dims {dims} profile {profile or 'distinct'} shift {args.shift} pt {args.pt}")
    for k in Verdict:
        print(f"  {k.value:13s} {tally[k]}/{args.pairs}")
    print(f"  time per pair: median {np.median(times):.3f}s, max {np.max(times):.3f}s")
    if residuals:
        print(f"  witness residual: max {np.max(residuals):.2e}")


if __name__ == "__main__":
    main()
