"""Rule 184 lanes in unit-free kinematic-wave scaling.

Free-flow speed and wave speed are both one cell per step, so the
triangular fundamental diagram has saturation flow 1/2 at density 1/2 and
jam density 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FREE_FLOW_SPEED = 1.0
WAVE_SPEED = 1.0
JAM_DENSITY = 1.0
SATURATION_FLOW = FREE_FLOW_SPEED * WAVE_SPEED / (FREE_FLOW_SPEED + WAVE_SPEED)

# new c_i indexed by the neighborhood (c_{i-1}, c_i, c_{i+1}) read as a 3-bit number
RULE_184 = 184


def rule184_cell(left: int, centre: int, right: int) -> int:
    """New value of one cell from its neighborhood, looked up in the rule number."""
    return (RULE_184 >> (left << 2 | centre << 1 | right)) & 1


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Gated:
    """Open lane ends.

    ``inflow_bit`` is a virtual cell upstream of the first cell. A closed
    outflow behaves as an occupied cell past the last one, an open outflow
    as an empty one.
    """

    inflow_bit: int = 0
    outflow_open: bool = True


PERIODIC = Periodic()


def as_lane(cells) -> np.ndarray:
    lane = np.asarray(cells)
    if lane.ndim != 1 or lane.size < 1:
        raise ValueError("a lane is a non-empty 1-d bit sequence")
    if not np.isin(lane, (0, 1)).all():
        raise ValueError("lane cells must be 0 or 1")
    return lane.astype(bool)


def rule184_step(lane, boundary: Periodic | Gated = PERIODIC) -> np.ndarray:
    """One synchronous Rule 184 update; returns a new uint8 lane."""
    c = as_lane(lane)
    if isinstance(boundary, Periodic):
        left = np.roll(c, 1)
        right = np.roll(c, -1)
    else:
        if boundary.inflow_bit not in (0, 1):
            raise ValueError("inflow_bit must be 0 or 1")
        left = np.concatenate(([bool(boundary.inflow_bit)], c[:-1]))
        right = np.concatenate((c[1:], [not boundary.outflow_open]))
    new = (left & ~c) | (c & right)
    return new.astype(np.uint8)


def ring_moves(lane) -> int:
    """Vehicles that advance on a periodic lane in the next step."""
    c = as_lane(lane)
    return int(np.count_nonzero(c & ~np.roll(c, -1)))


def ring_flow(lane, steps: int, transient: int = 0) -> float:
    """Space-mean flow on an isolated ring averaged over ``steps`` after a transient."""
    c = as_lane(lane).astype(np.uint8)
    for _ in range(transient):
        c = rule184_step(c)
    moved = 0
    for _ in range(steps):
        moved += ring_moves(c)
        c = rule184_step(c)
    return moved / (steps * c.size)
