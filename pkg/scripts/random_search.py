"""Fraction of standard-normal weight vectors competitive with LQF.

    python3 scripts/random_search.py --trials 100 --out results/random_search
"""

import argparse
from pathlib import Path

import numpy as np

from mfdlab.analytics import default_densities, estimate_mfd
from mfdlab.io import write_csv
from mfdlab.learning import random_search
from mfdlab.network import NetworkConfig
from mfdlab.policies import Policy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--search-reps", type=int, default=10)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=14)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/random_search")
    args = ap.parse_args()
    cfg = NetworkConfig()
    ks = default_densities()
    lqf = estimate_mfd(cfg, Policy("lqf"), ks, args.reps, seed=0, jobs=args.jobs)
    trials = random_search(args.trials, args.seed, cfg, lqf, reps=args.search_reps, jobs=args.jobs)
    rows = [(i, int(t.competitive), *(t.mfd.mean / lqf.mean)) for i, t in enumerate(trials)]
    cols = ("trial", "competitive", *[f"ratio_{k:.1f}" for k in ks])
    write_csv(Path(args.out) / "random_search.csv", cols, rows, [f"network: {cfg}", f"seed: {args.seed}"])
    ratios = np.array([r[2:] for r in rows])
    print(f"competitive fraction {np.mean([t.competitive for t in trials]):.2f}")
    print(f"best worst-ratio {ratios.min(axis=1).max():.3f}")


if __name__ == "__main__":
    main()
