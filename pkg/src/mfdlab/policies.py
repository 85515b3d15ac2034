"""Signal policies sharing one decision interface.

Phase 0 is NS-green and phase 1 is EW-green (NS-red), so the neural
policy's action "NS-red" coincides with phase 1.

Observation layout, per intersection::

    [NS-in1, NS-in2, EW-in1, EW-in2, NS-out1, NS-out2, EW-out1, EW-out2]

where in1/out1 are the north-bound and east-bound lanes and in2/out2 the
south-bound and west-bound ones.

Neural weights are a flat vector laid out as ``W1 (H x 8) | b1 (H) |
W2 (H x H) | b2 (H)``, row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .network import ParameterError, StructuralError

NS_GREEN, EW_GREEN = 0, 1
NS_RED = EW_GREEN
OBS_DIM = 8
HIDDEN = 16
WEIGHTS_FORMAT_VERSION = 1

LQF, SQF, RND, NEURAL = "lqf", "sqf", "rnd", "neural"
KINDS = (LQF, SQF, RND, NEURAL)


def n_params(hidden: int = HIDDEN) -> int:
    return hidden * OBS_DIM + hidden + hidden * hidden + hidden


def min_green(kind: str, ell: float, lam: float) -> int:
    """Minimum green time in steps: 2*ell/lam, or ell/lam for the random policy."""
    if kind not in KINDS:
        raise ParameterError("policy", f"unknown policy kind {kind!r}")
    if not lam > 0:
        raise ParameterError("lambda", "must be positive")
    g = ell / lam if kind == RND else 2 * ell / lam
    return max(1, int(np.floor(g + 0.5)))


def extreme_states(ell: int) -> tuple[np.ndarray, np.ndarray]:
    """(s1, s2): NS empty with EW jammed, and the axis-swapped state."""
    if ell < 1:
        raise ParameterError("ell", "must be >= 1")
    s1 = np.array([0, 0, ell, ell, 0, 0, 0, 0], dtype=float)
    s2 = np.array([ell, ell, 0, 0, 0, 0, 0, 0], dtype=float)
    return s1, s2


def axis_sums(obs) -> tuple[np.ndarray, np.ndarray]:
    obs = np.asarray(obs)
    return obs[..., 0] + obs[..., 1], obs[..., 2] + obs[..., 3]


# --- neural head -----------------------------------------------------------


def unpack(theta, hidden: int = HIDDEN):
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.size != n_params(hidden):
        raise StructuralError(
            f"theta has {theta.size} entries, expected {n_params(hidden)} for H={hidden}"
        )
    h8 = hidden * OBS_DIM
    W1 = theta[:h8].reshape(hidden, OBS_DIM)
    b1 = theta[h8 : h8 + hidden]
    W2 = theta[h8 + hidden : h8 + hidden + hidden * hidden].reshape(hidden, hidden)
    b2 = theta[h8 + hidden + hidden * hidden :]
    return W1, b1, W2, b2


def hidden_of(theta) -> int:
    # solve H^2 + 10H = size
    size = np.asarray(theta).size
    h = int(round((-10 + np.sqrt(100 + 4 * size)) / 2))
    if n_params(h) != size:
        raise StructuralError(f"{size} weights do not match any hidden width")
    return h


def _check_obs(obs) -> np.ndarray:
    obs = np.asarray(obs, dtype=float)
    if obs.shape[-1] != OBS_DIM:
        raise StructuralError(f"observation must have {OBS_DIM} entries, got {obs.shape[-1]}")
    return obs


def logit(theta, obs) -> np.ndarray:
    """Pre-sigmoid output: sum of the second linear layer."""
    W1, b1, W2, b2 = unpack(theta, hidden_of(theta))
    h = np.tanh(_check_obs(obs) @ W1.T + b1)
    return h @ W2.sum(axis=0) + b2.sum()


# keeps probabilities strictly inside (0, 1) where float64 would round to an end
_P_MIN = np.finfo(float).tiny
_P_MAX = 1.0 - 2.0**-53


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    p = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return np.clip(p, _P_MIN, _P_MAX)


def policy_forward(theta, obs) -> np.ndarray:
    """Probability of NS-red; broadcasts over leading observation axes."""
    return sigmoid(logit(theta, obs))


def grad_logit(theta, obs) -> tuple[float, np.ndarray]:
    """Logit and its gradient with respect to theta for one observation."""
    hdim = hidden_of(theta)
    W1, b1, W2, b2 = unpack(theta, hdim)
    s = _check_obs(obs)
    if s.ndim != 1:
        raise StructuralError("grad_logit takes a single observation")
    h = np.tanh(W1 @ s + b1)
    colsum = W2.sum(axis=0)
    z = float(h @ colsum + b2.sum())
    dpre = (1.0 - h * h) * colsum
    grad = np.concatenate(
        [np.outer(dpre, s).ravel(), dpre, np.tile(h, hdim), np.ones(hdim)]
    )
    return z, grad


def grad_log_prob(theta, obs, action: int) -> np.ndarray:
    """Gradient of log pi(action | obs) for action NS-red (1) or NS-green (0)."""
    if action not in (NS_GREEN, NS_RED):
        raise ParameterError("action", "must be 0 (NS-green) or 1 (NS-red)")
    z, dz = grad_logit(theta, obs)
    prob = float(sigmoid(z))
    return (1.0 - prob) * dz if action == NS_RED else -prob * dz


def init_theta(seed, scale: float = 1.0, hidden: int = HIDDEN) -> np.ndarray:
    return scale * np.random.default_rng(seed).standard_normal(n_params(hidden))


def save_weights(theta, path, header_lines=()) -> None:
    theta = np.asarray(theta, dtype=float)
    hdim = hidden_of(theta)
    header = (
        f"mfdlab-weights version={WEIGHTS_FORMAT_VERSION} hidden={hdim} "
        f"layout=W1[{hdim}x{OBS_DIM}],b1[{hdim}],W2[{hdim}x{hdim}],b2[{hdim}]"
    )
    body = "\n".join(repr(float(x)) for x in theta)
    extra = "".join(f"# {line}\n" for line in header_lines)
    Path(path).write_text(f"# {header}\n{extra}{body}\n")


def load_weights(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# mfdlab-weights"):
        raise StructuralError(f"{path}: missing weights header")
    meta = dict(tok.split("=", 1) for tok in lines[0][2:].split()[1:])
    if int(meta["version"]) != WEIGHTS_FORMAT_VERSION:
        raise StructuralError(f"{path}: unsupported weights version {meta['version']}")
    theta = np.array([float(x) for x in lines[1:] if x.strip() and not x.startswith("#")])
    if theta.size != n_params(int(meta["hidden"])):
        raise StructuralError(f"{path}: weight count does not match hidden={meta['hidden']}")
    return theta


# --- policies --------------------------------------------------------------


@dataclass(frozen=True)
class Policy:
    kind: str
    theta: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError("policy", f"unknown policy kind {self.kind!r}")
        if self.kind == NEURAL:
            if self.theta is None:
                raise ParameterError("weights", "neural policy needs a weight vector")
            theta = np.asarray(self.theta, dtype=float)
            if not np.isfinite(theta).all():
                raise ParameterError("weights", "weights must be finite")
            hidden_of(theta)
            object.__setattr__(self, "theta", theta)

    @property
    def tag(self) -> str:
        return self.kind

    def green_time(self, ell: float, lam: float) -> int:
        return min_green(self.kind, ell, lam)

    def prob_ns_red(self, obs) -> np.ndarray:
        return policy_forward(self.theta, obs)

    def decide(self, obs, current_phase, rng: np.random.Generator) -> np.ndarray:
        """Phase to hold for the next green interval, vectorized over intersections."""
        current = np.asarray(current_phase)
        if self.kind == RND:
            return (rng.random(current.shape) < 0.5).astype(np.int8)
        if self.kind == NEURAL:
            prob = self.prob_ns_red(obs)
            return (rng.random(prob.shape) < prob).astype(np.int8)
        ns, ew = axis_sums(obs)
        if self.kind == LQF:
            pick = np.where(ns > ew, NS_GREEN, EW_GREEN)
        else:
            pick = np.where(ns < ew, NS_GREEN, EW_GREEN)
        return np.where(ns == ew, current, pick).astype(np.int8)


def make_policy(kind: str, theta=None) -> Policy:
    return Policy(kind.lower(), theta)


LQF_POLICY = Policy(LQF)
SQF_POLICY = Policy(SQF)
RND_POLICY = Policy(RND)
