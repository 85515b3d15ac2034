"""Extreme cuts, band overlap, MFD skewness and SQF detaching."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..network import NetworkConfig, ParameterError, StructuralError, build_network
from ..policies import EW_GREEN, LQF_POLICY, NS_GREEN, Policy
from ..simulation import init_bernoulli, run
from .mfd import MfdEstimate

SKEW_TOLERANCE = 0.05


@dataclass(frozen=True)
class CutEstimate:
    u0: float
    w0: float

    def free_flow_line(self, k):
        return self.u0 * np.asarray(k, dtype=float)

    def congested_line(self, k):
        return self.w0 * (1.0 - np.asarray(k, dtype=float))


def extreme_cuts(lam: float, delta: float) -> CutEstimate:
    """Wave speeds of the extreme free-flow and congested cuts, 4*lam/(delta^2 + 2*lam + 1)."""
    if not lam > 0:
        raise ParameterError("lambda", "must be positive")
    if delta < 0:
        raise ParameterError("delta", "must be nonnegative")
    speed = 4 * lam / (delta**2 + 2 * lam + 1)
    return CutEstimate(speed, speed)


def _common_grid(a: MfdEstimate, b: MfdEstimate, density_range):
    lo, hi = density_range
    ia = (a.densities >= lo - 1e-12) & (a.densities <= hi + 1e-12)
    ib = (b.densities >= lo - 1e-12) & (b.densities <= hi + 1e-12)
    if not np.array_equal(a.densities[ia], b.densities[ib]):
        raise StructuralError("estimates do not share a density grid on the range")
    if not ia.any():
        raise StructuralError("no densities inside the range")
    return ia, ib


def overlap_test(a: MfdEstimate, b: MfdEstimate, density_range=(0.0, 1.0)) -> bool:
    """True iff the [p5, p95] bands intersect at every density in range."""
    ia, ib = _common_grid(a, b, density_range)
    lo = np.maximum(a.p5[ia], b.p5[ib])
    hi = np.minimum(a.p95[ia], b.p95[ib])
    return bool(np.all(lo <= hi))


def peak_density(densities, mean) -> float:
    """Density of maximum flow, refined by a parabola through the best grid point."""
    k = np.asarray(densities, dtype=float)
    q = np.asarray(mean, dtype=float)
    i = int(np.argmax(q))
    if i == 0 or i == k.size - 1:
        return float(k[i])
    a, b, _ = np.polyfit(k[i - 1 : i + 2], q[i - 1 : i + 2], 2)
    if a >= 0:
        return float(k[i])
    return float(np.clip(-b / (2 * a), k[i - 1], k[i + 1]))


def skewness(mfd: MfdEstimate, tau: float = SKEW_TOLERANCE) -> str:
    """'left', 'symmetric' or 'right' according to where the flow peaks."""
    k = mfd.densities
    if k.size < 5 or k.min() > 0.1 + 1e-9 or k.max() < 0.9 - 1e-9:
        raise StructuralError("skewness needs >= 5 densities spanning 0.1..0.9")
    k_star = peak_density(k, mfd.mean)
    if k_star < 0.5 - tau:
        return "left"
    if k_star > 0.5 + tau:
        return "right"
    return "symmetric"


@dataclass
class DetachingReport:
    permanent_colors: bool
    green_street_fraction: float
    mean_flow: float
    lqf_mean_flow: float
    detaching: bool
    green_rows: list = dataclasses.field(default_factory=list)
    green_cols: list = dataclasses.field(default_factory=list)


def _final_quarter(cfg, policy, k, horizon, seed):
    net = build_network(cfg)
    state = init_bernoulli(net, [k], seed)
    g = policy.green_time(cfg.ell, cfg.lam)
    head = horizon - horizon // 4
    state, _ = run(state, net, policy, head, g=g)
    switches0 = state.switches.copy()
    state, trace = run(state, net, policy, horizon - head, g=g)
    fixed = (state.switches == switches0)[0].reshape(cfg.rows, cfg.cols)
    phase = state.phase[0].reshape(cfg.rows, cfg.cols)
    return fixed, phase, float(trace.flow().mean())


def detect_detaching(
    cfg: NetworkConfig, policy: Policy, k: float, horizon: int | None = None, seed: int = 0
) -> DetachingReport:
    """Classify streets over the final quarter of a run.

    A street is green when every light on it held its axis green for the
    whole final quarter. The LQF reference runs the same network, density
    and seed.
    """
    if not 0 < k < 1:
        raise ParameterError("k", "must lie in (0, 1)")
    if horizon is None:
        horizon = 60 * 2 * policy.green_time(cfg.ell, cfg.lam)
    if horizon < 4:
        raise ParameterError("horizon", "must be >= 4 steps")
    fixed, phase, flow = _final_quarter(cfg, policy, k, horizon, seed)
    _, _, lqf_flow = _final_quarter(cfg, LQF_POLICY, k, horizon, seed)
    green_rows = [r for r in range(cfg.rows) if (fixed[r] & (phase[r] == EW_GREEN)).all()]
    green_cols = [c for c in range(cfg.cols) if (fixed[:, c] & (phase[:, c] == NS_GREEN)).all()]
    fraction = (len(green_rows) + len(green_cols)) / (cfg.rows + cfg.cols)
    return DetachingReport(
        permanent_colors=bool(fixed.all()),
        green_street_fraction=fraction,
        mean_flow=flow,
        lqf_mean_flow=lqf_flow,
        detaching=flow > lqf_flow,
        green_rows=green_rows,
        green_cols=green_cols,
    )
