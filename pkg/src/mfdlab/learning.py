"""REINFORCE-TD, two-example supervised training and random search."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .analytics.mfd import MfdEstimate, estimate_mfd
from .network import NetworkConfig, ParameterError, build_network
from .policies import (
    NEURAL,
    NS_GREEN,
    NS_RED,
    Policy,
    extreme_states,
    grad_log_prob,
    grad_logit,
    init_theta,
    min_green,
    policy_forward,
)
from .simulation import init_bernoulli, set_phases, step

ALPHA = 0.2
BETA = 0.05
COMPETITIVE_RATIO = 0.9
TRACE_COLUMNS = ("iteration", "eta", "grad_norm", "pi_s1", "pi_s2")


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, outputs):
        super().__init__(f"{message}; outputs={np.round(outputs, 6).tolist()}")
        self.outputs = outputs


@dataclass
class RewardSpec:
    """LQF mean flow as a function of density, linearly interpolated on [0, 1]."""

    densities: np.ndarray
    flows: np.ndarray
    g: int

    def __post_init__(self):
        k = np.asarray(self.densities, dtype=float)
        q = np.asarray(self.flows, dtype=float)
        if k.size != q.size or np.any(np.diff(k) <= 0):
            raise ParameterError("lqf_baseline", "need strictly increasing densities")
        if k[0] > 0:
            k, q = np.concatenate(([0.0], k)), np.concatenate(([0.0], q))
        if k[-1] < 1:
            k, q = np.concatenate((k, [1.0])), np.concatenate((q, [0.0]))
        self.densities, self.flows = k, q
        if self.g < 1:
            raise ParameterError("g", "must be >= 1")

    @classmethod
    def from_mfd(cls, mfd: MfdEstimate, g: int) -> RewardSpec:
        return cls(mfd.densities, mfd.mean, g)

    def __call__(self, k: float) -> float:
        if not 0 <= k <= 1:
            raise ParameterError("k", "must lie in [0, 1]")
        return float(np.interp(k, self.densities, self.flows))


def advantage_reward(crossings: float, k: float, spec: RewardSpec) -> float:
    """Crossings per incoming lane per step minus the LQF flow at density k."""
    return crossings / (spec.g * 4) - spec(k)


@dataclass
class TraceRecord:
    iteration: int
    eta: float
    grad_norm: float
    pi_s1: float
    pi_s2: float


@dataclass
class TrainerState:
    theta: np.ndarray
    eta: float = 0.0
    alpha: float = ALPHA
    beta: float = BETA
    iteration: int = 0
    traces: list = field(default_factory=list)

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ParameterError("alpha", "learning rates must be positive")
        self.theta = np.array(self.theta, dtype=float)

    def trace_array(self) -> np.ndarray:
        return np.array(
            [(r.iteration, r.eta, r.grad_norm, r.pi_s1, r.pi_s2) for r in self.traces]
        ).reshape(-1, 5)

    def write_traces(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_COLUMNS)
            for r in self.traces:
                w.writerow([r.iteration, repr(r.eta), repr(r.grad_norm), repr(r.pi_s1), repr(r.pi_s2)])


def td_update(ts: TrainerState, reward: float, grad) -> float:
    """G <- R - eta; eta <- eta + beta*G; theta <- theta + alpha*G*grad. Returns G."""
    G = reward - ts.eta
    ts.eta = ts.eta + ts.beta * G
    ts.theta = ts.theta + ts.alpha * G * np.asarray(grad)
    ts.iteration += 1
    return G


def reinforce_td(
    cfg: NetworkConfig,
    k: float,
    theta0,
    reward_spec: RewardSpec,
    iterations: int,
    alpha: float = ALPHA,
    beta: float = BETA,
    seed: int = 0,
    monitored: int = 0,
    trace_every: int = 1,
) -> TrainerState:
    """Continuing-task policy gradient on one monitored intersection.

    Every intersection acts with the current shared weights; only the
    monitored one supplies (S, A, R) to the update.
    """
    if not 0 <= k <= 1:
        raise ParameterError("k", "training density must lie in [0, 1]")
    if iterations < 1:
        raise ParameterError("iterations", "must be >= 1")
    net = build_network(cfg)
    g = min_green(NEURAL, cfg.ell, cfg.lam)
    if reward_spec.g != g:
        raise ParameterError("g", f"reward spec uses g={reward_spec.g}, network needs {g}")
    sim_ss, act_ss = np.random.SeedSequence(seed).spawn(2)
    state = init_bernoulli(net, [k], sim_ss)
    act_rng = np.random.default_rng(act_ss)
    s1, s2 = extreme_states(cfg.ell)
    ts = TrainerState(theta0, alpha=alpha, beta=beta)

    for it in range(iterations):
        obs = state.observations()[0]
        prob = policy_forward(ts.theta, obs)
        actions = (act_rng.random(prob.shape) < prob).astype(np.int8)
        set_phases(state, actions[None, :])
        crossed = 0
        for _ in range(g):
            state, m = step(state, net)
            crossed += int(m.crossings[0, monitored])
        reward = advantage_reward(crossed, k, reward_spec)
        grad = grad_log_prob(ts.theta, obs[monitored], int(actions[monitored]))
        td_update(ts, reward, grad)
        if it % trace_every == 0 or it == iterations - 1:
            p1, p2 = policy_forward(ts.theta, np.stack([s1, s2]))
            ts.traces.append(
                TraceRecord(ts.iteration, ts.eta, float(np.linalg.norm(grad)), float(p1), float(p2))
            )
    return ts


# --- supervised ------------------------------------------------------------


def two_example_targets(ell: int):
    s1, s2 = extreme_states(ell)
    return [(s1, 1.0), (s2, 0.0)]


def bce_loss(theta, examples) -> float:
    """Summed binary cross-entropy of the NS-red probability."""
    loss = 0.0
    for obs, y in examples:
        p = float(policy_forward(theta, obs))
        loss -= y * np.log(p) + (1 - y) * np.log1p(-p)
    return loss


def train_supervised(
    examples,
    theta0,
    tolerance: float = 0.01,
    lr: float = 0.5,
    max_iter: int = 100_000,
) -> np.ndarray:
    """Full-batch gradient descent on summed cross-entropy until every output
    is within ``tolerance`` of its target."""
    obs = [np.asarray(o, dtype=float) for o, _ in examples]
    ys = np.array([y for _, y in examples], dtype=float)
    if len(obs) == 2 and np.array_equal(obs[0], obs[1]):
        raise ParameterError("targets", "the two examples must differ")
    theta = np.array(theta0, dtype=float)
    for _ in range(max_iter + 1):
        grads, outs = [], []
        for o in obs:
            z, dz = grad_logit(theta, o)
            outs.append(1.0 / (1.0 + np.exp(-z)))
            grads.append(dz)
        outs = np.array(outs)
        if np.all(np.abs(outs - ys) <= tolerance):
            return theta
        # d/dz of cross-entropy through a sigmoid is (p - y)
        theta = theta - lr * sum((p - y) * dz for p, y, dz in zip(outs, ys, grads))
    raise ConvergenceError(f"no convergence in {max_iter} iterations", outs)


# --- random search ---------------------------------------------------------


def is_competitive(mfd: MfdEstimate, lqf: MfdEstimate, ratio: float = COMPETITIVE_RATIO) -> bool:
    """Mean flow at least ``ratio`` of the LQF mean at every shared density."""
    if not np.allclose(mfd.densities, lqf.densities):
        raise ParameterError("densities", "estimates must share a density grid")
    return bool(np.all(mfd.mean >= ratio * lqf.mean))


@dataclass
class SearchTrial:
    theta: np.ndarray
    mfd: MfdEstimate
    competitive: bool


def random_search(
    trials: int,
    seed: int,
    cfg: NetworkConfig,
    lqf: MfdEstimate,
    reps: int = 10,
    warmup_cycles: int = 4,
    measure_cycles: int = 4,
    jobs: int = 1,
) -> list[SearchTrial]:
    """Standard-normal weights per trial, each scored by its deployed MFD."""
    if trials < 1:
        raise ParameterError("trials", "must be >= 1")
    out = []
    for t in range(trials):
        theta_seed, mfd_seed = np.random.SeedSequence([seed, t]).generate_state(2)
        theta = init_theta(int(theta_seed))
        mfd = estimate_mfd(
            cfg,
            Policy(NEURAL, theta),
            lqf.densities,
            reps=reps,
            warmup_cycles=warmup_cycles,
            measure_cycles=measure_cycles,
            seed=int(mfd_seed),
            jobs=jobs,
        )
        out.append(SearchTrial(theta, mfd, is_competitive(mfd, lqf)))
    return out


__all__ = [
    "ALPHA",
    "BETA",
    "ConvergenceError",
    "RewardSpec",
    "TrainerState",
    "TraceRecord",
    "advantage_reward",
    "td_update",
    "reinforce_td",
    "two_example_targets",
    "bce_loss",
    "train_supervised",
    "is_competitive",
    "SearchTrial",
    "random_search",
    "NS_GREEN",
    "NS_RED",
]
