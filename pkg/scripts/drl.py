"""REINFORCE-TD at one training density; writes the trace and deployed MFD.

    python3 scripts/drl.py --k 0.8 --iterations 6000 --out results/drl
"""

import argparse
from pathlib import Path

import numpy as np

from mfdlab.analytics import default_densities, estimate_mfd
from mfdlab.io import write_mfd
from mfdlab.learning import RewardSpec, reinforce_td
from mfdlab.network import NetworkConfig
from mfdlab.policies import Policy, init_theta, load_weights, min_green, save_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=0.2)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=0.75)
    ap.add_argument("--iterations", type=int, default=6000)
    ap.add_argument("--init", help="start from these weights instead of N(0,1)")
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/drl")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = NetworkConfig(lam=args.lam, p=args.p)
    ks = default_densities()
    lqf = estimate_mfd(cfg, Policy("lqf"), ks, args.reps, seed=args.seed)
    spec = RewardSpec.from_mfd(lqf, min_green("neural", cfg.ell, cfg.lam))
    theta0 = load_weights(args.init) if args.init else init_theta(args.seed)
    ts = reinforce_td(cfg, args.k, theta0, spec, args.iterations, seed=args.seed)
    stem = f"drl_k{args.k:g}_seed{args.seed}"
    header = [f"network: {cfg}", f"k: {args.k}", f"seed: {args.seed}"]
    ts.write_traces(out / f"{stem}_trace.csv", header)
    save_weights(ts.theta, out / f"{stem}.weights", header)
    tr = ts.trace_array()
    print(f"final pi(s1)={tr[-1, 3]:.3f} pi(s2)={tr[-1, 4]:.3f} eta={tr[-1, 1]:.4f}")
    neural = estimate_mfd(cfg, Policy("neural", ts.theta), ks, args.reps, seed=args.seed + 1)
    write_mfd(neural, out, header, stem=f"mfd_{stem}")
    print(f"worst neural/LQF ratio {np.min(neural.mean / lqf.mean):.3f}")


if __name__ == "__main__":
    main()
