"""Train the two-example supervised policy and compare its MFD with LQF.

    python3 scripts/supervised.py --out results/supervised
"""

import argparse
from pathlib import Path

import numpy as np

from mfdlab.analytics import default_densities, estimate_mfd
from mfdlab.io import write_mfd
from mfdlab.learning import train_supervised, two_example_targets
from mfdlab.network import NetworkConfig
from mfdlab.policies import Policy, extreme_states, init_theta, policy_forward, save_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=0.75)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/supervised")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = NetworkConfig(lam=args.lam, p=args.p)
    theta = train_supervised(two_example_targets(cfg.ell), init_theta(args.seed, 0.01))
    save_weights(theta, out / "supervised.weights", [f"network: {cfg}", f"seed: {args.seed}"])
    s1, s2 = extreme_states(cfg.ell)
    print(f"pi(s1)={float(policy_forward(theta, s1)):.4f} pi(s2)={float(policy_forward(theta, s2)):.4f}")
    ks = default_densities()
    neural = estimate_mfd(cfg, Policy("neural", theta), ks, args.reps, seed=args.seed + 1)
    lqf = estimate_mfd(cfg, Policy("lqf"), ks, args.reps, seed=args.seed)
    write_mfd(neural, out, [f"network: {cfg}"])
    write_mfd(lqf, out, [f"network: {cfg}"])
    for k, r in zip(ks, neural.mean / lqf.mean):
        print(f"k={k:.1f} neural/LQF = {r:.3f}")
    print(f"worst ratio {np.min(neural.mean / lqf.mean):.3f}")


if __name__ == "__main__":
    main()
