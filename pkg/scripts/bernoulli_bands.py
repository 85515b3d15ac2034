"""Binomial demand-model flow bands for LQF, SQF and RND after j cycles.

    python3 scripts/bernoulli_bands.py --ell 10 --js 1,2,5,10
"""

import argparse
from pathlib import Path

import numpy as np

from mfdlab.analytics import bernoulli_bands
from mfdlab.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=10)
    ap.add_argument("--js", default="1,2,5,10")
    ap.add_argument("--out", default="results/bernoulli")
    args = ap.parse_args()
    js = [int(j) for j in args.js.split(",")]
    ks = np.round(np.linspace(0.05, 0.95, 19), 10)
    rows = bernoulli_bands(["lqf", "sqf", "rnd"], js, args.ell, ks)
    path = write_csv(Path(args.out) / "bernoulli_bands.csv", ("policy", "j", "ell", "k", "q05", "q95"), rows, [f"ell: {args.ell}"])
    print(path)


if __name__ == "__main__":
    main()
