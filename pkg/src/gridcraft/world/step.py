"""Single-tick world transition.

``step`` is a pure transition: it clones the input state, applies exactly
one action, then runs tick-global dynamics. Within a tick the order is

1. tick counter increments;
2. the action resolves (movement, turning, attack, placement, crafting);
3. drowning accounting on the cell the agent now occupies;
4. on every fourth tick, each live animal takes one RNG draw (row order)
   and random-walks one cell if the chosen neighbour is Ground.

Action rules:
  * Forward/Backward move along/against facing; blocked unless the target
    cell is Ground or Water (the agent therefore only ever stands on those).
  * Attack prefers a live animal on the faced cell (one hit kills, yielding
    one raw meat of its kind and leaving mining progress untouched). If the
    faced cell is minable with the held tools, one hit of progress accrues;
    switching targets resets progress to the new cell's full hit count, and
    an inadequate tool makes no progress at all. A broken cell becomes
    Ground and yields one unit of its drop.
  * Placement requires the placed item in inventory and a Ground faced cell.
    PlaceFurnace while holding none instead crafts one from 8 cobblestone at
    a table (the furnace has no craft code of its own); holding one places it.
  * Craft/smelt actions apply their recipe iff every input is present and a
    required station cell sits within Chebyshev distance 1 of the agent;
    otherwise they do nothing. SmeltMeat cooks the lowest-coded raw meat
    held. Ineffective actions are still legal (they just consume the tick).
"""
from __future__ import annotations

from ..errors import EpisodeOver
from ..rng import GOLDEN, MASK64
from .items import (
    FURNACE_RECIPE,
    MEAT_RECIPES,
    MINING,
    PLACEMENTS,
    RAW_MEAT,
    RECIPES,
    STATION_CELL,
    Action,
    CellType,
    FACING_VECTORS,
    Recipe,
    Station,
    required_hits,
)
from .state import ANIMAL_ALIVE, ANIMAL_KIND, ANIMAL_X, ANIMAL_Y, TickOutcome, WorldState

ANIMAL_MOVE_PERIOD = 4
DROWN_LIMIT = 10  # ticks of submersion survivable; one more kills

# Hot-path integer constants (IntEnum attribute access is slow in loops).
_FORWARD = int(Action.Forward)
_BACKWARD = int(Action.Backward)
_TURN_LEFT = int(Action.TurnLeft)
_TURN_RIGHT = int(Action.TurnRight)
_ATTACK = int(Action.Attack)
_PLACE_FURNACE = int(Action.PlaceFurnace)
_SMELT_MEAT = int(Action.SmeltMeat)
_GROUND = int(CellType.Ground)
_WATER = int(CellType.Water)
_PLACEMENTS = {int(a): (int(item), int(cell)) for a, (item, cell) in PLACEMENTS.items()}
_RECIPES = {int(a): r for a, r in RECIPES.items()}


def _mix64(state: int) -> tuple[int, int]:
    """One inline splitmix64 draw; returns (new_state, value)."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _station_nearby(state: WorldState, station: Station) -> bool:
    if station == Station.Nothing:
        return True
    want = int(STATION_CELL[station])
    grid = state.grid
    ax, ay = state.agent.x, state.agent.y
    h, w = grid.shape
    window = grid[max(0, ay - 1):min(h, ay + 2), max(0, ax - 1):min(w, ax + 2)]
    return bool((window == want).any())


def _apply_recipe(state: WorldState, recipe: Recipe, acquired: list) -> bool:
    inv = state.agent.inventory
    if not _station_nearby(state, recipe.station):
        return False
    for item, count in recipe.inputs:
        if inv[item] < count:
            return False
    for item, count in recipe.inputs:
        inv[item] -= count
    inv[recipe.output] += recipe.output_count
    acquired.append((recipe.output, recipe.output_count))
    return True


def step(state: WorldState, action: int) -> tuple[WorldState, TickOutcome]:
    """Advance one tick. Returns the successor state and its outcome."""
    if not state.agent.alive:
        raise EpisodeOver("the agent is dead; reset the episode")
    action = int(action)
    if not 0 <= action < 16:
        raise ValueError(f"unknown action code {action}")

    before_inventory = state.agent.inventory
    new = state.clone()
    new.tick = state.tick + 1
    agent = new.agent
    grid = new.grid
    outcome = TickOutcome()

    if action == _FORWARD or action == _BACKWARD:
        dx, dy = FACING_VECTORS[agent.facing]
        if action == _BACKWARD:
            dx, dy = -dx, -dy
        tx, ty = agent.x + dx, agent.y + dy
        if new.in_bounds(tx, ty):
            c = grid[ty, tx]
            if c == _GROUND or c == _WATER:
                agent.x, agent.y = tx, ty
    elif action == _TURN_LEFT:
        agent.facing = (agent.facing - 1) % 4
    elif action == _TURN_RIGHT:
        agent.facing = (agent.facing + 1) % 4
    elif action == _ATTACK:
        fx, fy = agent.faced_cell()
        if new.in_bounds(fx, fy):
            victim = -1
            animals = new.animals
            for i in range(animals.shape[0]):
                row = animals[i]
                if row[ANIMAL_ALIVE] == 1 and row[ANIMAL_X] == fx and row[ANIMAL_Y] == fy:
                    victim = i
                    break
            if victim >= 0:
                animals[victim, ANIMAL_ALIVE] = 0
                meat = RAW_MEAT[int(animals[victim, ANIMAL_KIND])]
                agent.inventory[meat] += 1
                outcome.acquired.append((meat, 1))
            else:
                cell = int(grid[fy, fx])
                hits = required_hits(cell, agent.inventory)
                if hits is not None:
                    progress = new.mining_progress
                    if progress is not None and progress[0] == fx and progress[1] == fy:
                        remaining = progress[2] - 1
                    else:
                        remaining = hits - 1
                    if remaining <= 0:
                        drop = MINING[cell].yields
                        grid[fy, fx] = _GROUND
                        agent.inventory[drop] += 1
                        outcome.acquired.append((drop, 1))
                        outcome.cell_changed = (fx, fy, _GROUND)
                        new.mining_progress = None
                    else:
                        new.mining_progress = (fx, fy, remaining)
    elif action in _PLACEMENTS:
        item, cell_type = _PLACEMENTS[action]
        if action == _PLACE_FURNACE and agent.inventory[item] == 0:
            _apply_recipe(new, FURNACE_RECIPE, outcome.acquired)
        else:
            fx, fy = agent.faced_cell()
            if (agent.inventory[item] > 0 and new.in_bounds(fx, fy)
                    and grid[fy, fx] == _GROUND):
                agent.inventory[item] -= 1
                grid[fy, fx] = cell_type
                outcome.cell_changed = (fx, fy, cell_type)
    elif action in _RECIPES:
        _apply_recipe(new, _RECIPES[action], outcome.acquired)
    elif action == _SMELT_MEAT:
        for recipe in MEAT_RECIPES:
            if agent.inventory[recipe.inputs[0][0]] > 0:
                _apply_recipe(new, recipe, outcome.acquired)
                break

    # Drowning: the cell the agent occupies after the action resolves.
    if grid[agent.y, agent.x] == _WATER:
        agent.submerged_ticks += 1
        if agent.submerged_ticks > DROWN_LIMIT:
            agent.alive = False
            outcome.died = True
    else:
        agent.submerged_ticks = 0

    # Animal random walk: one draw per live animal, row order.
    if new.tick % ANIMAL_MOVE_PERIOD == 0 and new.animals.shape[0] > 0:
        rng_state = new.rng_state
        animals = new.animals
        h, w = grid.shape
        for i in range(animals.shape[0]):
            if animals[i, ANIMAL_ALIVE] != 1:
                continue
            rng_state, draw = _mix64(rng_state)
            dx, dy = FACING_VECTORS[draw % 4]
            tx, ty = animals[i, ANIMAL_X] + dx, animals[i, ANIMAL_Y] + dy
            if 0 <= tx < w and 0 <= ty < h and grid[ty, tx] == _GROUND:
                animals[i, ANIMAL_X] = tx
                animals[i, ANIMAL_Y] = ty
        new.rng_state = rng_state

    # Episode-first detection is the caller's business; this reports the
    # tick-local 0 -> positive transitions.
    if outcome.acquired:
        inv = agent.inventory
        seen = set()
        for item, _count in outcome.acquired:
            if item not in seen and before_inventory[item] == 0 and inv[item] > 0:
                outcome.first_acquisitions.append(item)
                seen.add(item)

    return new, outcome
