"""Command-line entry point: ``mfdlab <subcommand> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    bernoulli_bands,
    detect_detaching,
    estimate_mfd,
    extreme_cuts,
)
from .config import ExperimentConfig, default_seed, load_config
from .io import read_csv, write_csv, write_mfd
from .learning import (
    RewardSpec,
    random_search,
    reinforce_td,
    train_supervised,
    two_example_targets,
)
from .network import ParameterError, StructuralError, build_network
from .policies import NEURAL, Policy, init_theta, load_weights, min_green, save_weights
from .simulation import dump_state, init_bernoulli, run

log = logging.getLogger("mfdlab")

SUBCOMMANDS = (
    "simulate",
    "mfd",
    "cuts",
    "bernoulli",
    "train-rl",
    "train-supervised",
    "random-search",
    "detect",
    "compare",
)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--config", help="JSON experiment config; flags override its values")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output directory")
    g.add_argument("--policy", help="lqf, sqf, rnd or neural (comma list for mfd)")
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--ell", type=int)
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--densities", type=_floats)
    g.add_argument("--reps", type=int)
    g.add_argument("--warmup-cycles", type=int)
    g.add_argument("--measure-cycles", type=int)
    g.add_argument("--weights", help="neural weight file")
    g.add_argument("--jobs", type=int)
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="mfdlab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="single run, per-step flow series")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--dump", action="store_true", help="also write the final occupancy")

    sub.add_parser("mfd", parents=[common], help="MFD with 5/95 percentile bands")
    sub.add_parser("cuts", parents=[common], help="extreme cut wave speeds")

    p = sub.add_parser("bernoulli", parents=[common], help="binomial demand-model flow bands")
    p.add_argument("--js", type=_ints, default=[1, 2, 5, 10])
    p.add_argument("--bernoulli-policies", default="lqf,sqf,rnd")

    p = sub.add_parser("train-rl", parents=[common], help="REINFORCE-TD on one intersection")
    p.add_argument("--k", type=float, help="training density")
    p.add_argument("--iterations", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--init-scale", type=float)
    p.add_argument("--lqf-csv", help="LQF aggregate CSV for the reward baseline")

    p = sub.add_parser("train-supervised", parents=[common], help="two-example supervised policy")
    p.add_argument("--init-scale", type=float, default=0.01)
    p.add_argument("--tolerance", type=float, default=0.01)

    p = sub.add_parser("random-search", parents=[common], help="standard-normal weight trials")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--search-reps", type=int, default=10)

    p = sub.add_parser("detect", parents=[common], help="permanent street colors and detaching")
    p.add_argument("--k", type=float, default=0.7)
    p.add_argument("--horizon", type=int)

    p = sub.add_parser("compare", parents=[common], help="compare two aggregate MFD CSVs")
    p.add_argument("a", help="aggregate CSV under test")
    p.add_argument("b", help="reference aggregate CSV (e.g. LQF)")
    p.add_argument("--range", dest="krange", type=_floats, default=[0.0, 1.0])
    p.add_argument("--ratio", type=float, default=0.9)
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(seed=default_seed())
    net = {
        "rows": args.rows,
        "cols": args.cols,
        "ell": args.ell,
        "lam": args.lam,
        "delta": args.delta,
        "p": args.p,
    }
    net = {k: v for k, v in net.items() if v is not None}
    if args.seed is not None:
        cfg.seed = args.seed
    network = dataclasses.replace(cfg.network, **net) if net else cfg.network
    cfg.network = dataclasses.replace(network, seed=cfg.seed)
    for name in ("policy", "densities", "reps", "warmup_cycles", "measure_cycles", "weights", "jobs", "out"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    tr = cfg.trainer
    for flag, attr in (("k", "training_density"), ("iterations", "iterations"), ("alpha", "alpha"),
                       ("beta", "beta"), ("init_scale", "init_scale")):
        if args.command == "train-rl" and getattr(args, flag, None) is not None:
            setattr(tr, attr, getattr(args, flag))
    cfg.validate()
    return cfg


def _header(command: str, cfg: ExperimentConfig, extra: dict | None = None) -> list[str]:
    lines = [f"mfdlab {__version__} {command}", f"config: {cfg.to_json()}", f"seed: {cfg.seed}"]
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    return lines


def _policy(kind: str, cfg: ExperimentConfig) -> Policy:
    if kind == NEURAL:
        return Policy(NEURAL, load_weights(cfg.weights))
    return Policy(kind)


def cmd_simulate(args, cfg):
    net = build_network(cfg.network)
    policy = _policy(cfg.policy.split(",")[0], cfg)
    if not 0 <= args.k <= 1:
        raise ParameterError("k", "must lie in [0, 1]")
    state = init_bernoulli(net, [args.k], cfg.seed)
    state, trace = run(state, net, policy, args.steps)
    out = Path(cfg.out)
    rows = ((t + 1, int(trace.moved[t, 0]), trace.moved[t, 0] / net.ncells) for t in range(args.steps))
    path = write_csv(out / f"simulate_{policy.tag}.csv", ("step", "moved", "flow"), rows,
                     _header("simulate", cfg, {"k": args.k, "steps": args.steps}))
    print(path)
    if args.dump:
        (out / f"simulate_{policy.tag}_state.txt").write_text(dump_state(state))
        (out / "network.txt").write_text(net.to_text())


def cmd_mfd(args, cfg):
    for kind in cfg.policy.split(","):
        policy = _policy(kind, cfg)
        mfd = estimate_mfd(cfg.network, policy, cfg.densities, cfg.reps, cfg.warmup_cycles,
                           cfg.measure_cycles, cfg.seed, cfg.jobs)
        for path in write_mfd(mfd, cfg.out, _header("mfd", cfg, {"policy": kind})):
            print(path)


def cmd_cuts(args, cfg):
    cut = extreme_cuts(cfg.network.lam, cfg.network.delta)
    path = write_csv(Path(cfg.out) / "cuts.csv", ("lambda", "delta", "u0", "w0"),
                     [(cfg.network.lam, cfg.network.delta, cut.u0, cut.w0)], _header("cuts", cfg))
    print(path)


def cmd_bernoulli(args, cfg):
    policies = [p.strip() for p in args.bernoulli_policies.split(",")]
    rows = bernoulli_bands(policies, args.js, cfg.network.ell, cfg.densities)
    path = write_csv(Path(cfg.out) / "bernoulli_bands.csv", ("policy", "j", "ell", "k", "q05", "q95"),
                     rows, _header("bernoulli", cfg, {"js": args.js}))
    print(path)


def _lqf_reference(cfg, lqf_csv=None):
    if lqf_csv:
        _, rows = read_csv(lqf_csv)
        return np.array([float(r["k"]) for r in rows]), np.array([float(r["mean"]) for r in rows])
    mfd = estimate_mfd(cfg.network, Policy("lqf"), cfg.densities, cfg.reps, cfg.warmup_cycles,
                       cfg.measure_cycles, cfg.seed, cfg.jobs)
    return mfd.densities, mfd.mean


def cmd_train_rl(args, cfg):
    tr = cfg.trainer
    ks, flows = _lqf_reference(cfg, args.lqf_csv)
    g = min_green(NEURAL, cfg.network.ell, cfg.network.lam)
    spec = RewardSpec(ks, flows, g)
    if cfg.weights:
        theta0 = load_weights(cfg.weights)
    else:
        theta0 = init_theta(cfg.seed, tr.init_scale)
    ts = reinforce_td(cfg.network, tr.training_density, theta0, spec, tr.iterations,
                      tr.alpha, tr.beta, seed=cfg.seed)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"drl_k{tr.training_density:g}"
    ts.write_traces(out / f"{stem}_trace.csv", _header("train-rl", cfg))
    save_weights(ts.theta, out / f"{stem}.weights", _header("train-rl", cfg))
    print(out / f"{stem}_trace.csv")
    print(out / f"{stem}.weights")


def cmd_train_supervised(args, cfg):
    theta = train_supervised(two_example_targets(cfg.network.ell),
                             init_theta(cfg.seed, args.init_scale), tolerance=args.tolerance)
    path = Path(cfg.out) / "supervised.weights"
    path.parent.mkdir(parents=True, exist_ok=True)
    save_weights(theta, path, _header("train-supervised", cfg, {"init_scale": args.init_scale}))
    print(path)


def cmd_random_search(args, cfg):
    lqf = estimate_mfd(cfg.network, Policy("lqf"), cfg.densities, cfg.reps, cfg.warmup_cycles,
                       cfg.measure_cycles, cfg.seed, cfg.jobs)
    trials = random_search(args.trials, cfg.seed, cfg.network, lqf, reps=args.search_reps,
                           warmup_cycles=cfg.warmup_cycles, measure_cycles=cfg.measure_cycles,
                           jobs=cfg.jobs)
    rows = []
    for i, t in enumerate(trials):
        ratio = t.mfd.mean / lqf.mean
        rows.append((i, int(t.competitive), float(ratio.min()), *map(float, t.mfd.mean)))
    columns = ("trial", "competitive", "min_ratio", *[f"q_{k:g}" for k in lqf.densities])
    frac = np.mean([t.competitive for t in trials])
    path = write_csv(Path(cfg.out) / "random_search.csv", columns, rows,
                     _header("random-search", cfg, {"competitive_fraction": frac}))
    print(path)
    print(f"competitive fraction: {frac:.3f}")


def cmd_detect(args, cfg):
    policy = _policy(cfg.policy.split(",")[0], cfg)
    rep = detect_detaching(cfg.network, policy, args.k, args.horizon, cfg.seed)
    cols = ("policy", "k", "permanent_colors", "green_street_fraction", "mean_flow", "lqf_mean_flow", "detaching")
    row = (policy.tag, args.k, int(rep.permanent_colors), rep.green_street_fraction, rep.mean_flow,
           rep.lqf_mean_flow, int(rep.detaching))
    path = write_csv(Path(cfg.out) / f"detect_{policy.tag}.csv", cols, [row], _header("detect", cfg))
    print(path)


def cmd_compare(args, cfg):
    _, a = read_csv(args.a)
    _, b = read_csv(args.b)
    ka = [float(r["k"]) for r in a]
    kb = [float(r["k"]) for r in b]
    if not np.allclose(ka, kb):
        raise StructuralError("aggregate CSVs use different density grids")
    lo, hi = args.krange
    rows, overlap_all, competitive = [], True, True
    for ra, rb in zip(a, b):
        k = float(ra["k"])
        ma, mb = float(ra["mean"]), float(rb["mean"])
        overlap = max(float(ra["p5"]), float(rb["p5"])) <= min(float(ra["p95"]), float(rb["p95"]))
        ratio = ma / mb if mb > 0 else float("nan")
        if lo - 1e-12 <= k <= hi + 1e-12:
            overlap_all &= overlap
            competitive &= ma >= args.ratio * mb
        rows.append((k, ma, mb, ratio, int(overlap)))
    path = write_csv(Path(cfg.out) / "compare.csv", ("k", "mean_a", "mean_b", "ratio", "overlap"), rows,
                     _header("compare", cfg, {"a": args.a, "b": args.b, "overlap_all": overlap_all,
                                              "competitive": competitive}))
    print(path)
    print(f"overlap on [{lo:g}, {hi:g}]: {overlap_all}; competitive (>= {args.ratio:g}): {competitive}")


_COMMANDS = {
    "simulate": cmd_simulate,
    "mfd": cmd_mfd,
    "cuts": cmd_cuts,
    "bernoulli": cmd_bernoulli,
    "train-rl": cmd_train_rl,
    "train-supervised": cmd_train_supervised,
    "random-search": cmd_random_search,
    "detect": cmd_detect,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        _COMMANDS[args.command](args, cfg)
    except ParameterError as exc:
        print(f"mfdlab: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (StructuralError, FileNotFoundError) as exc:
        print(f"mfdlab: error: {exc}", file=sys.stderr)
        return 1
    return 0


def run_subcommand(argv) -> int:
    """Run one subcommand from an argument list; returns the exit status."""
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
