"""Scan SQF over (p, k) at lambda=0.5 for permanent street colors and detaching.

    python3 scripts/detaching.py --ps 0.1,0.2,0.3,0.5 --ks 0.5,0.6,0.7,0.8
"""

import argparse
from pathlib import Path

from mfdlab.analytics import detect_detaching
from mfdlab.io import write_csv
from mfdlab.network import NetworkConfig
from mfdlab.policies import Policy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=0.5)
    ap.add_argument("--ps", default="0.1,0.2,0.3,0.5")
    ap.add_argument("--ks", default="0.5,0.6,0.7,0.8")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/detaching")
    args = ap.parse_args()
    rows = []
    for p in map(float, args.ps.split(",")):
        cfg = NetworkConfig(lam=args.lam, p=p)
        for k in map(float, args.ks.split(",")):
            r = detect_detaching(cfg, Policy("sqf"), k, seed=args.seed)
            rows.append((p, k, int(r.permanent_colors), r.green_street_fraction, r.mean_flow, r.lqf_mean_flow, int(r.detaching)))
            print(rows[-1])
    cols = ("p", "k", "permanent_colors", "green_street_fraction", "mean_flow", "lqf_mean_flow", "detaching")
    write_csv(Path(args.out) / "detaching.csv", cols, rows, [f"lambda: {args.lam}", f"seed: {args.seed}"])


if __name__ == "__main__":
    main()
