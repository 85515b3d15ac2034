"""Monte-Carlo MFD estimation with 5th/95th percentile bands."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..network import NetworkConfig, ParameterError, StructuralError, build_network
from ..policies import Policy
from ..simulation import init_bernoulli, run

# rows per vectorized batch; fixed so that results never depend on worker count
CHUNK_ROWS = 512


@dataclass
class MfdEstimate:
    policy: str
    lam: float
    delta: float
    p: float
    densities: np.ndarray
    samples: np.ndarray  # (n_densities, reps) replicate mean flows

    def __post_init__(self):
        self.densities = np.asarray(self.densities, dtype=float)
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[0] != self.densities.size:
            raise StructuralError("samples must be (n_densities, reps)")
        if np.any(np.diff(self.densities) <= 0):
            raise StructuralError("densities must be strictly increasing")

    @property
    def reps(self) -> int:
        return self.samples.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=1)

    @property
    def p5(self) -> np.ndarray:
        return np.percentile(self.samples, 5, axis=1)

    @property
    def p95(self) -> np.ndarray:
        return np.percentile(self.samples, 95, axis=1)

    def at(self, densities) -> MfdEstimate:
        """Restriction to a subset of the density grid."""
        idx = [int(np.flatnonzero(np.isclose(self.densities, k))[0]) for k in densities]
        return dataclasses.replace(
            self, densities=self.densities[idx], samples=self.samples[idx]
        )

    def sample_rows(self):
        for i, k in enumerate(self.densities):
            for rep, q in enumerate(self.samples[i]):
                yield (self.policy, self.lam, self.delta, self.p, k, rep, q)

    def aggregate_rows(self):
        for row in zip(self.densities, self.mean, self.p5, self.p95):
            yield (self.policy, self.lam, self.delta, self.p, *row)


SAMPLE_COLUMNS = ("policy", "lambda", "delta", "p", "k", "rep", "flow")
AGGREGATE_COLUMNS = ("policy", "lambda", "delta", "p", "k", "mean", "p5", "p95")


def _rep_network_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, rep]).generate_state(1)[0])


def _simulate_chunk(cfg, policy, densities, n_reps, warmup, measure, seed_seq):
    net = build_network(cfg)
    ks = np.tile(densities, n_reps)
    state = init_bernoulli(net, ks, seed_seq)
    count0 = state.vehicle_count()
    g = policy.green_time(cfg.ell, cfg.lam)
    if warmup:
        state, _ = run(state, net, policy, warmup, g=g)
    state, trace = run(state, net, policy, measure, g=g)
    if not np.array_equal(state.vehicle_count(), count0):
        raise AssertionError("vehicle count not conserved")
    flows = trace.flow().mean(axis=0)
    return flows.reshape(n_reps, len(densities)).T


def plan_chunks(cfg: NetworkConfig, n_densities: int, reps: int, seed: int):
    """Deterministic (cfg, reps_in_chunk, seed_seq) tasks covering all replicates.

    Replicates share a chunk only when they share a network layout.
    """
    per_chunk = max(1, CHUNK_ROWS // n_densities)
    if cfg.delta == 0:
        groups = [(cfg, list(range(reps)))]
    else:
        groups = [
            (dataclasses.replace(cfg, seed=_rep_network_seed(cfg.seed, r)), [r])
            for r in range(reps)
        ]
    tasks = []
    for net_cfg, members in groups:
        for start in range(0, len(members), per_chunk):
            n = len(members[start : start + per_chunk])
            ss = np.random.SeedSequence([seed, len(tasks)])
            tasks.append((net_cfg, n, ss))
    return tasks


def estimate_mfd(
    cfg: NetworkConfig,
    policy: Policy,
    densities,
    reps: int = 50,
    warmup_cycles: int = 4,
    measure_cycles: int = 4,
    seed: int = 0,
    jobs: int = 1,
) -> MfdEstimate:
    """Replicate mean flows per density after discarding a warm-up.

    A cycle lasts ``2g`` steps, ``g`` being the policy's minimum green.
    """
    densities = np.asarray(densities, dtype=float)
    if densities.ndim != 1 or densities.size < 1:
        raise ParameterError("densities", "need a non-empty 1-d grid")
    if ((densities <= 0) | (densities > 1)).any():
        raise ParameterError("densities", "must lie in (0, 1]")
    if reps < 2:
        raise ParameterError("reps", "must be >= 2")
    if warmup_cycles < 0 or measure_cycles < 1:
        raise ParameterError("measure_cycles", "need warmup >= 0 and measure >= 1 cycles")
    g = policy.green_time(cfg.ell, cfg.lam)
    warm, meas = warmup_cycles * 2 * g, measure_cycles * 2 * g
    tasks = plan_chunks(cfg, densities.size, reps, seed)
    args = [(c, policy, densities, n, warm, meas, ss) for c, n, ss in tasks]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_simulate_chunk, *zip(*args)))
    else:
        parts = [_simulate_chunk(*a) for a in args]
    samples = np.concatenate(parts, axis=1)
    return MfdEstimate(policy.tag, cfg.lam, cfg.delta, cfg.p, densities, samples)


def default_densities(n: int = 9) -> np.ndarray:
    """Evenly spaced grid 0.1, 0.2, ..., 0.9 for n = 9."""
    return np.round(np.linspace(0.1, 0.9, n), 10)
