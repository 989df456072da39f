"""World-state containers.

States are value-like: ``clone`` produces an independent copy, and the
single-step transition never mutates its input. Animals live in a compact
``(n, 4)`` int32 array with columns (kind, x, y, alive); row order is the
generation order and fixes the per-tick RNG draw order.
"""
from __future__ import annotations

import numpy as np

from .items import FACING_VECTORS, N_ITEMS, Facing

ANIMAL_KIND, ANIMAL_X, ANIMAL_Y, ANIMAL_ALIVE = 0, 1, 2, 3


class AgentState:
    """Mutable per-agent fields.

    Attributes (declaration order is the canonical hash order):
        x, y: grid position (column, row).
        facing: Facing code.
        inventory: int32 count vector indexed by ItemId.
        alive: False once the agent has died (absorbing).
        submerged_ticks: consecutive ticks spent standing on Water.
    """

    __slots__ = ("x", "y", "facing", "inventory", "alive", "submerged_ticks")

    def __init__(self, x: int, y: int, facing: int = Facing.North,
                 inventory: np.ndarray | None = None, alive: bool = True,
                 submerged_ticks: int = 0) -> None:
        self.x = x
        self.y = y
        self.facing = int(facing)
        self.inventory = (
            inventory if inventory is not None else np.zeros(N_ITEMS, dtype=np.int32)
        )
        self.alive = alive
        self.submerged_ticks = submerged_ticks

    def clone(self) -> "AgentState":
        return AgentState(self.x, self.y, self.facing, self.inventory.copy(),
                          self.alive, self.submerged_ticks)

    def faced_cell(self) -> tuple[int, int]:
        dx, dy = FACING_VECTORS[self.facing]
        return self.x + dx, self.y + dy


class WorldState:
    """Complete simulator state.

    Attributes:
        grid: uint8 CellType matrix, indexed [y, x].
        agent: AgentState.
        animals: (n, 4) int32 array of (kind, x, y, alive) rows.
        tick: steps elapsed since reset.
        rng_state: internal splitmix64 state driving animal movement.
        mining_progress: None or (x, y, hits_remaining) for the cell under
            attack; persists until the cell breaks or a different cell is hit.
        navigate_goal: None or (x, y) goal cell for navigation tasks.
    """

    __slots__ = ("grid", "agent", "animals", "tick", "rng_state",
                 "mining_progress", "navigate_goal")

    def __init__(self, grid: np.ndarray, agent: AgentState, animals: np.ndarray,
                 tick: int = 0, rng_state: int = 0,
                 mining_progress: tuple[int, int, int] | None = None,
                 navigate_goal: tuple[int, int] | None = None) -> None:
        self.grid = grid
        self.agent = agent
        self.animals = animals
        self.tick = tick
        self.rng_state = rng_state
        self.mining_progress = mining_progress
        self.navigate_goal = navigate_goal

    @property
    def side(self) -> int:
        return self.grid.shape[0]

    def clone(self) -> "WorldState":
        return WorldState(self.grid.copy(), self.agent.clone(), self.animals.copy(),
                          self.tick, self.rng_state, self.mining_progress,
                          self.navigate_goal)

    def cell(self, x: int, y: int) -> int:
        return int(self.grid[y, x])

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.grid.shape[1] and 0 <= y < self.grid.shape[0]


class TickOutcome:
    """What a single step produced.

    Attributes:
        acquired: list of (ItemId, count) gained this tick.
        died: True if the agent died this tick.
        cell_changed: None or (x, y, new CellType code) when the grid changed.
        first_acquisitions: items whose inventory count went 0 -> positive
            this tick (a subset of ``acquired`` item ids).
    """

    __slots__ = ("acquired", "died", "cell_changed", "first_acquisitions")

    def __init__(self, acquired=None, died=False, cell_changed=None,
                 first_acquisitions=None) -> None:
        self.acquired = acquired if acquired is not None else []
        self.died = died
        self.cell_changed = cell_changed
        self.first_acquisitions = first_acquisitions if first_acquisitions is not None else []

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (f"TickOutcome(acquired={self.acquired}, died={self.died}, "
                f"cell_changed={self.cell_changed}, "
                f"first_acquisitions={self.first_acquisitions})")
