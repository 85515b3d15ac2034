"""LQF, SQF and RND MFDs over a (lambda, p) grid on the 8x8 torus.

    python3 scripts/baseline_mfds.py --lambdas 0.5,1,2 --ps 0.2,0.75 --out results/baselines
"""

import argparse
from pathlib import Path

from mfdlab.analytics import default_densities, estimate_mfd, extreme_cuts, skewness
from mfdlab.io import write_csv, write_mfd
from mfdlab.network import NetworkConfig
from mfdlab.policies import Policy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambdas", default="0.5,1,2")
    ap.add_argument("--ps", default="0.2,0.75")
    ap.add_argument("--delta", type=float, default=0.0)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/baselines")
    args = ap.parse_args()
    out = Path(args.out)
    summary = []
    for lam in map(float, args.lambdas.split(",")):
        for p in map(float, args.ps.split(",")):
            cfg = NetworkConfig(lam=lam, delta=args.delta, p=p)
            cut = extreme_cuts(lam, args.delta)
            for kind in ("lqf", "sqf", "rnd"):
                mfd = estimate_mfd(cfg, Policy(kind), default_densities(), args.reps, seed=args.seed, jobs=args.jobs)
                header = [f"network: {cfg}", f"reps: {args.reps}", f"seed: {args.seed}"]
                write_mfd(mfd, out, header, stem=f"mfd_{kind}_lam{lam:g}_p{p:g}")
                summary.append((kind, lam, args.delta, p, skewness(mfd), float(mfd.mean.max()), cut.u0))
                print(summary[-1])
    write_csv(out / "summary.csv", ("policy", "lambda", "delta", "p", "skew", "max_flow", "u0"), summary)


if __name__ == "__main__":
    main()
