"""Network dynamics: in-block Rule 184, signal gating, random turning.

A ``NetworkState`` holds a batch of independent replicates of the same
network so that many densities or repetitions advance in one vectorized
step. Row ``b`` of every array belongs to replicate ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Network, ParameterError, StructuralError
from .policies import EW_GREEN, NS_GREEN

# offsets from the arriving heading for left, right and U-turns (headings run clockwise)
_TURN_OFFSET = np.array([3, 1, 2], dtype=np.int64)
# observation order: N-bound, S-bound, E-bound, W-bound
_OBS_HEADINGS = np.array([0, 2, 1, 3])


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


@dataclass
class NetworkState:
    net: Network = field(repr=False)
    occ: np.ndarray = field(repr=False)  # (B, ncells + 1) bool, last column always empty
    phase: np.ndarray  # (B, I) int8
    time_in_phase: np.ndarray  # (B, I)
    switches: np.ndarray  # (B, I) phase changes since creation
    rng: np.random.Generator = field(repr=False)
    t: int = 0

    @property
    def batch(self) -> int:
        return self.occ.shape[0]

    @property
    def cells(self) -> np.ndarray:
        return self.occ[:, :-1]

    def vehicle_count(self) -> np.ndarray:
        return np.count_nonzero(self.cells, axis=1)

    def density(self) -> np.ndarray:
        return self.vehicle_count() / self.net.ncells

    def copy(self) -> NetworkState:
        rng = np.random.Generator(type(self.rng.bit_generator)())
        rng.bit_generator.state = self.rng.bit_generator.state
        return NetworkState(
            self.net,
            self.occ.copy(),
            self.phase.copy(),
            self.time_in_phase.copy(),
            self.switches.copy(),
            rng,
            self.t,
        )

    def block_counts(self) -> np.ndarray:
        return np.add.reduceat(self.cells.astype(np.int32), self.net.starts, axis=1)

    def observations(self) -> np.ndarray:
        """(B, I, 8) vehicle counts on incoming then outgoing approaches."""
        counts = self.block_counts()
        inc = self.net.inc[:, _OBS_HEADINGS]
        out = self.net.out[:, _OBS_HEADINGS]
        return np.concatenate([counts[:, inc], counts[:, out]], axis=2)


@dataclass
class StepMetrics:
    moved_count: np.ndarray  # (B,)
    crossings: np.ndarray  # (B, I)


def init_bernoulli(net: Network, k, seed) -> NetworkState:
    """Independent Bernoulli(k) occupancy per cell; one replicate per entry of ``k``.

    Phases start NS-green. The initialization and the dynamics draw from
    separate child streams of ``seed``.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if ks.ndim != 1 or ((ks < 0) | (ks > 1) | ~np.isfinite(ks)).any():
        raise ParameterError("k", "density must lie in [0, 1]")
    init_ss, dyn_ss = _seed_sequence(seed).spawn(2)
    init_rng = np.random.default_rng(init_ss)
    B, I = ks.size, net.n_intersections
    occ = np.zeros((B, net.ncells + 1), dtype=bool)
    occ[:, :-1] = init_rng.random((B, net.ncells)) < ks[:, None]
    return NetworkState(
        net,
        occ,
        np.full((B, I), NS_GREEN, dtype=np.int8),
        np.zeros((B, I), dtype=np.int64),
        np.zeros((B, I), dtype=np.int64),
        np.random.default_rng(dyn_ss),
    )


def _check(state: NetworkState, net: Network):
    if state.net is not net and state.net.fingerprint() != net.fingerprint():
        raise StructuralError("state belongs to a different network")


def set_phases(state: NetworkState, new_phase) -> None:
    new_phase = np.asarray(new_phase, dtype=np.int8)
    changed = new_phase != state.phase
    state.switches += changed
    state.time_in_phase = np.where(changed, 0, state.time_in_phase)
    state.phase = new_phase


def apply_controller(state: NetworkState, controller) -> None:
    obs = state.observations()
    set_phases(state, controller.decide(obs, state.phase, state.rng))


def step(state: NetworkState, net: Network, controller=None, g: int | None = None):
    """Advance every replicate by one time step, in place.

    When ``controller`` is given and the clock sits on a multiple of ``g``
    its ``decide(obs, phase, rng)`` sets the phases first.
    """
    _check(state, net)
    if controller is not None:
        if g is None:
            g = controller.green_time(net.cfg.ell, net.cfg.lam)
        if state.t > 0 and state.t % g == 0:
            apply_controller(state, controller)

    occ = state.occ
    B, I = state.batch, net.n_intersections
    ncells = net.ncells
    rng = state.rng
    p = net.cfg.p

    cells = occ[:, :-1]
    move = cells & ~occ[:, net.nxt]  # stop lines point at themselves, never move here
    new = np.empty_like(occ)
    new[:, :-1] = (cells & ~move) | np.pad(move, ((0, 0), (0, 1)))[:, net.prev]
    new[:, -1] = False

    # two green approaches per intersection: heading phase and phase + 2
    inc_stop = net.stopline[net.inc]  # (I, 4)
    out_entry = net.entry[net.out]
    rows = np.arange(I)
    stride = ncells + 1
    base = (np.arange(B) * stride)[:, None]
    flat = occ.ravel()
    u = rng.random((B, I, 2))
    coin = rng.random((B, I)) < 0.5

    src, dst, ok = [], [], []
    for side in range(2):
        heading = state.phase.astype(np.int64) + 2 * side  # (B, I)
        stop_cell = inc_stop[rows, heading]
        turn = u[:, :, side] < p
        # turning drivers split evenly over left, right and U-turn; u/p is uniform on [0, 1)
        frac = np.where(turn, u[:, :, side], 0.0) / p if p > 0 else np.zeros_like(u[:, :, side])
        which = np.minimum((np.minimum(frac, 1.0) * 3).astype(np.int64), 2)
        target = np.where(turn, (heading + _TURN_OFFSET[which]) % 4, heading)
        entry_cell = out_entry[rows, target]
        present = flat[base + stop_cell]
        free = ~flat[base + entry_cell]
        src.append(stop_cell)
        dst.append(entry_cell)
        ok.append((present & free, target))
    (ok_a, tgt_a), (ok_b, tgt_b) = ok
    clash = ok_a & ok_b & (tgt_a == tgt_b)
    ok_a = ok_a & ~(clash & coin)
    ok_b = ok_b & ~(clash & ~coin)

    new_flat = new.ravel()
    for cross, s, d in ((ok_a, src[0], dst[0]), (ok_b, src[1], dst[1])):
        new_flat[(base + s)[cross]] = False
        new_flat[(base + d)[cross]] = True

    crossings = ok_a.astype(np.int8) + ok_b
    state.occ = new
    state.t += 1
    state.time_in_phase += 1
    moved = np.count_nonzero(move, axis=1) + crossings.sum(axis=1, dtype=np.int64)
    return state, StepMetrics(moved, crossings)


@dataclass
class Trace:
    moved: np.ndarray  # (steps, B)
    crossings: np.ndarray | None  # (steps, B, I) when recorded
    ncells: int

    def flow(self) -> np.ndarray:
        """Per-step space-mean flow, (steps, B)."""
        return self.moved / self.ncells


def run(
    state: NetworkState,
    net: Network,
    policy,
    steps: int,
    g: int | None = None,
    record_crossings: bool = False,
    check_conservation: bool = False,
) -> tuple[NetworkState, Trace]:
    """Advance ``steps`` steps with ``policy`` deciding every ``g`` steps."""
    if steps < 1:
        raise ParameterError("steps", "horizon must be >= 1")
    if g is None:
        g = policy.green_time(net.cfg.ell, net.cfg.lam)
    moved = np.empty((steps, state.batch), dtype=np.int64)
    crossings = (
        np.empty((steps, state.batch, net.n_intersections), dtype=np.int8)
        if record_crossings
        else None
    )
    count0 = state.vehicle_count() if check_conservation else None
    for t in range(steps):
        state, m = step(state, net, policy, g)
        moved[t] = m.moved_count
        if crossings is not None:
            crossings[t] = m.crossings
        if check_conservation and not np.array_equal(state.vehicle_count(), count0):
            raise AssertionError(f"vehicle count changed at step {state.t}")
    return state, Trace(moved, crossings, net.ncells)


def measure_flow(before: NetworkState, after: NetworkState) -> np.ndarray:
    """Vehicles advanced between two consecutive states per cell, per replicate.

    Interior moves follow from ``before`` alone; a stop-line cell that empties
    can only have crossed, since nothing enters an occupied stop line.
    """
    net = before.net
    if after.net is not net and after.net.fingerprint() != net.fingerprint():
        raise StructuralError("states belong to different networks")
    if before.occ.shape != after.occ.shape:
        raise StructuralError("states have different batch shapes")
    if after.t != before.t + 1:
        raise StructuralError("states must be exactly one step apart")
    cells = before.cells
    interior = cells & ~before.occ[:, net.nxt]
    stop = net.stopline
    crossed = cells[:, stop] & ~after.cells[:, stop]
    return (np.count_nonzero(interior, axis=1) + np.count_nonzero(crossed, axis=1)) / net.ncells


def dump_state(state: NetworkState, b: int = 0) -> str:
    """One line of 0/1 per block for replicate ``b``."""
    net = state.net
    cells = state.cells[b].astype(np.uint8)
    lines = []
    for blk in range(net.n_blocks):
        s = net.starts[blk]
        lines.append("".join(map(str, cells[s : s + net.lengths[blk]])))
    return "\n".join(lines) + "\n"


__all__ = [
    "NetworkState",
    "StepMetrics",
    "Trace",
    "init_bernoulli",
    "step",
    "run",
    "measure_flow",
    "dump_state",
    "set_phases",
    "apply_controller",
    "NS_GREEN",
    "EW_GREEN",
]
