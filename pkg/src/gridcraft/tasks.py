"""Task definitions layered over the world core.

A task pins down generation profile, milestone reward schedule, terminal
item, tick cap, and observation contents. Reward semantics by family:

  * Obtain tasks pay each scheduled item's reward once, on the first tick
    the item's inventory count goes from zero to positive (the episode-level
    ``achieved`` set enforces pay-once even if the item is spent and
    regained);
  * Treechop pays +1 per log unit acquired and succeeds at 64 units;
  * NavigateSparse pays +100 once the agent stands within Chebyshev
    distance 1 of the goal (then succeeds);
  * NavigateDense pays the per-tick decrease in Euclidean distance to the
    goal. Distances are quantised to 1/2**20 of a cell, which makes every
    per-tick reward and every partial sum exactly representable in float64,
    so the rewards telescope bit-exactly to initial-distance minus
    final-distance under any summation order (individual rewards are also
    float32-exact, since one tick changes the distance by at most sqrt(2)).
  * Survival pays nothing and simply runs to its cap.

Episode termination reasons are exclusive, checked in the order success,
death, tick_cap. Success means the terminal item was acquired (Obtain),
64 units were gathered (Treechop), or the goal was reached (Navigate).
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from .errors import ConfigurationError, EpisodeOver, NoScheduleError
from .rng import fnv1a64
from .world import (
    GenConfig,
    ItemId,
    N_ITEMS,
    TexturePack,
    WorldState,
    generate_world,
    render_pov,
    step,
)
from .world.items import COOKED_MEAT, RAW_MEAT, AnimalKind, FACING_VECTORS


class TaskId(IntEnum):
    Treechop = 0
    NavigateSparse = 1
    NavigateDense = 2
    ObtainIronPickaxe = 3
    ObtainCookedMeatCow = 4
    ObtainCookedMeatChicken = 5
    ObtainCookedMeatSheep = 6
    ObtainCookedMeatPig = 7
    ObtainDiamond = 8
    Survival = 9


TASK_NAMES = {
    TaskId.Treechop: "treechop",
    TaskId.NavigateSparse: "navigate-sparse",
    TaskId.NavigateDense: "navigate-dense",
    TaskId.ObtainIronPickaxe: "obtain-iron-pickaxe",
    TaskId.ObtainCookedMeatCow: "obtain-cooked-meat-cow",
    TaskId.ObtainCookedMeatChicken: "obtain-cooked-meat-chicken",
    TaskId.ObtainCookedMeatSheep: "obtain-cooked-meat-sheep",
    TaskId.ObtainCookedMeatPig: "obtain-cooked-meat-pig",
    TaskId.ObtainDiamond: "obtain-diamond",
    TaskId.Survival: "survival",
}
TASK_BY_NAME = {v: k for k, v in TASK_NAMES.items()}

MEAT_TASK_KIND = {
    TaskId.ObtainCookedMeatCow: AnimalKind.Cow,
    TaskId.ObtainCookedMeatChicken: AnimalKind.Chicken,
    TaskId.ObtainCookedMeatSheep: AnimalKind.Sheep,
    TaskId.ObtainCookedMeatPig: AnimalKind.Pig,
}

# Full milestone ladder for the diamond task; the iron-pickaxe task uses the
# prefix that ends at IronPickaxe.
DIAMOND_SCHEDULE: dict[ItemId, float] = {
    ItemId.Log: 1.0,
    ItemId.Planks: 2.0,
    ItemId.Stick: 4.0,
    ItemId.CraftingTable: 4.0,
    ItemId.WoodenPickaxe: 8.0,
    ItemId.Cobblestone: 16.0,
    ItemId.Furnace: 32.0,
    ItemId.StonePickaxe: 32.0,
    ItemId.IronOre: 64.0,
    ItemId.IronIngot: 128.0,
    ItemId.IronPickaxe: 256.0,
    ItemId.Diamond: 1024.0,
}

IRON_PICKAXE_SCHEDULE: dict[ItemId, float] = {
    item: value for item, value in DIAMOND_SCHEDULE.items() if item != ItemId.Diamond
}


def _meat_schedule(kind: AnimalKind) -> dict[ItemId, float]:
    return {
        ItemId.Log: 1.0,
        ItemId.Planks: 2.0,
        ItemId.CraftingTable: 4.0,
        ItemId.Cobblestone: 16.0,
        ItemId.Furnace: 32.0,
        RAW_MEAT[kind]: 64.0,
        COOKED_MEAT[kind]: 1024.0,
    }


TREECHOP_TARGET_UNITS = 64
NAVIGATE_ARRIVAL_RADIUS = 1  # Chebyshev
NAVIGATE_SPARSE_REWARD = 100.0

# Distance quantum for dense navigation rewards: fine enough to be
# invisible in scores, coarse enough that all sums stay exact in floats.
DIST_QUANTUM_BITS = 20
_DIST_SCALE = float(1 << DIST_QUANTUM_BITS)


def quantised_distance(dx: float, dy: float) -> float:
    """Euclidean length snapped to the 2**-20 grid (exactly representable)."""
    return round(math.hypot(dx, dy) * _DIST_SCALE) / _DIST_SCALE


@dataclass(frozen=True)
class RewardSchedule:
    milestones: dict[ItemId, float]
    terminal_item: ItemId | None = None


@dataclass(frozen=True)
class ObservationSpec:
    inventory_items: tuple[ItemId, ...] = tuple(ItemId)
    compass: bool = False


@dataclass(frozen=True)
class TaskSpec:
    task_id: TaskId
    schedule: RewardSchedule | None
    tick_cap: int
    dense_navigation: bool = False
    goal_distance: int = 0
    starting_inventory: dict[ItemId, int] = field(default_factory=dict)
    observation: ObservationSpec = field(default_factory=ObservationSpec)
    gen: GenConfig = field(default_factory=GenConfig)

    @property
    def name(self) -> str:
        return TASK_NAMES[self.task_id]


@dataclass
class Observation:
    pov: np.ndarray            # (64, 64, 3) uint8
    inventory: np.ndarray      # int32 counts in observation item order
    compass_angle: float       # radians in [-pi, pi]; 0.0 when absent


@dataclass
class EpisodeState:
    world: WorldState
    spec: TaskSpec
    pack: TexturePack
    achieved: set[ItemId] = field(default_factory=set)
    cumulative_score: float = 0.0
    done: bool = False
    done_reason: str = "none"  # none | success | death | tick_cap
    units_collected: int = 0   # Treechop per-unit counter
    _initial_distance: float = 0.0
    _prev_distance: float = 0.0


# --- task construction -----------------------------------------------------

_TREECHOP_GEN = GenConfig(tree_density=0.22, stone_density=0.04, iron_density=0.01,
                          diamond_density=0.0005, water_density=0.08)
# Navigation rewards route-finding over clutter-threading: mostly-open
# terrain with enough scatter that straight lines still fail sometimes.
_NAVIGATE_GEN = GenConfig(side=128, tree_density=0.03, stone_density=0.02,
                          iron_density=0.0, diamond_density=0.0,
                          water_density=0.02)


def make_task(task_id: TaskId, overrides: dict | None = None) -> TaskSpec:
    """Build the default TaskSpec for ``task_id``.

    ``overrides`` may remap ``tick_cap``, ``goal_distance``, or any GenConfig
    field (``side`` and the densities / ``animal_count``).
    """
    task_id = TaskId(task_id)
    if task_id == TaskId.Treechop:
        spec = TaskSpec(task_id, RewardSchedule({ItemId.Log: 1.0}), tick_cap=2000,
                        starting_inventory={ItemId.IronAxe: 1}, gen=_TREECHOP_GEN)
    elif task_id == TaskId.NavigateSparse:
        spec = TaskSpec(task_id, None, tick_cap=2000, goal_distance=64,
                        observation=ObservationSpec(compass=True), gen=_NAVIGATE_GEN)
    elif task_id == TaskId.NavigateDense:
        spec = TaskSpec(task_id, None, tick_cap=2000, dense_navigation=True,
                        goal_distance=64, observation=ObservationSpec(compass=True),
                        gen=_NAVIGATE_GEN)
    elif task_id == TaskId.ObtainIronPickaxe:
        spec = TaskSpec(task_id, RewardSchedule(IRON_PICKAXE_SCHEDULE,
                                                ItemId.IronPickaxe), tick_cap=18000)
    elif task_id in MEAT_TASK_KIND:
        kind = MEAT_TASK_KIND[task_id]
        spec = TaskSpec(task_id, RewardSchedule(_meat_schedule(kind),
                                                COOKED_MEAT[kind]), tick_cap=18000)
    elif task_id == TaskId.ObtainDiamond:
        spec = TaskSpec(task_id, RewardSchedule(DIAMOND_SCHEDULE, ItemId.Diamond),
                        tick_cap=18000)
    elif task_id == TaskId.Survival:
        spec = TaskSpec(task_id, None, tick_cap=18000)
    else:  # pragma: no cover
        raise ConfigurationError(f"unknown task id {task_id}")

    if overrides:
        gen_fields = {f for f in GenConfig.__dataclass_fields__}
        gen_updates = {k: v for k, v in overrides.items() if k in gen_fields}
        spec_updates = {k: v for k, v in overrides.items()
                        if k in ("tick_cap", "goal_distance")}
        unknown = set(overrides) - gen_fields - set(spec_updates)
        if unknown:
            raise ConfigurationError(f"unknown task overrides: {sorted(unknown)}")
        if gen_updates:
            spec_updates["gen"] = replace(spec.gen, **gen_updates)
        spec = replace(spec, **spec_updates)
        if spec.tick_cap <= 0:
            raise ConfigurationError("tick_cap must be positive")
    return spec


def spec_digest(spec: TaskSpec) -> int:
    """FNV-1a 64 digest of the canonical TaskSpec serialization; logs carry
    it so replays can detect incompatible task definitions."""
    parts = [struct.pack("<BQBI", int(spec.task_id), spec.tick_cap,
                         1 if spec.dense_navigation else 0, spec.goal_distance)]
    inv = np.zeros(N_ITEMS, dtype=np.uint32)
    for item, count in spec.starting_inventory.items():
        inv[item] = count
    parts.append(inv.astype("<u4").tobytes())
    parts.append(struct.pack("<B", 1 if spec.observation.compass else 0))
    parts.append(struct.pack("<H", len(spec.observation.inventory_items)))
    parts.append(bytes(int(i) for i in spec.observation.inventory_items))
    if spec.schedule is None:
        parts.append(struct.pack("<H", 0))
        parts.append(struct.pack("<h", -1))
    else:
        items = sorted(spec.schedule.milestones)
        parts.append(struct.pack("<H", len(items)))
        for item in items:
            parts.append(struct.pack("<Bd", int(item), spec.schedule.milestones[item]))
        terminal = spec.schedule.terminal_item
        parts.append(struct.pack("<h", -1 if terminal is None else int(terminal)))
    g = spec.gen
    parts.append(struct.pack("<Iddddd", g.side, g.tree_density, g.stone_density,
                             g.iron_density, g.diamond_density, g.water_density))
    parts.append(struct.pack("<I", g.animal_count))
    return fnv1a64(b"".join(parts))


def max_score(spec: TaskSpec) -> float:
    """Best attainable score for schedule-bearing tasks (sum of milestone
    rewards; per-unit total for Treechop)."""
    if spec.schedule is None:
        raise NoScheduleError(f"{spec.name} has no milestone schedule")
    if spec.task_id == TaskId.Treechop:
        return float(TREECHOP_TARGET_UNITS) * spec.schedule.milestones[ItemId.Log]
    return float(sum(spec.schedule.milestones.values()))


# --- episode lifecycle -----------------------------------------------------

_DEFAULT_PACK: TexturePack | None = None


def _default_pack() -> TexturePack:
    global _DEFAULT_PACK
    if _DEFAULT_PACK is None:
        from .world import make_texture_pack

        _DEFAULT_PACK = make_texture_pack(seed=1)
    return _DEFAULT_PACK


def _distance_to_goal(world: WorldState) -> float:
    gx, gy = world.navigate_goal
    return quantised_distance(gx - world.agent.x, gy - world.agent.y)


def begin(spec: TaskSpec, seed: int, pack: TexturePack | None = None
          ) -> EpisodeState:
    """Start an episode without rendering: generate the world, apply the
    starting inventory, and (for navigation) place the goal exactly
    ``goal_distance`` cells away (Euclidean, rounded) via one world-RNG draw
    over the Ground candidates."""
    if pack is None:
        pack = _default_pack()
    world = generate_world(seed, spec.gen)
    for item, count in spec.starting_inventory.items():
        world.agent.inventory[item] += count

    if spec.goal_distance > 0:
        from .rng import SplitMix64

        ax, ay = world.agent.x, world.agent.y
        ys, xs = np.nonzero(world.grid == 0)  # Ground
        d = np.hypot(xs.astype(np.float64) - ax, ys.astype(np.float64) - ay)
        lo, hi = spec.goal_distance - 0.5, spec.goal_distance + 0.5
        candidates = np.nonzero((d >= lo) & (d < hi))[0]
        if len(candidates) == 0:
            raise ConfigurationError(
                f"no Ground cell at distance {spec.goal_distance} from the spawn")
        rng = SplitMix64(world.rng_state)
        pick = candidates[rng.next_below(len(candidates))]
        world.navigate_goal = (int(xs[pick]), int(ys[pick]))
        world.rng_state = rng.state

    episode = EpisodeState(world=world, spec=spec, pack=pack)
    if spec.dense_navigation:
        episode._initial_distance = _distance_to_goal(world)
        episode._prev_distance = episode._initial_distance
    return episode


def reset(spec: TaskSpec, seed: int, pack: TexturePack | None = None
          ) -> tuple[EpisodeState, Observation]:
    """``begin`` plus the first rendered observation."""
    episode = begin(spec, seed, pack)
    return episode, observe(episode)


def compass_angle_to_goal(world: WorldState) -> float:
    """Angle from the agent's facing direction to the goal, in [-pi, pi];
    positive means the goal lies clockwise (to the agent's right)."""
    if world.navigate_goal is None:
        return 0.0
    gx, gy = world.navigate_goal
    dx = gx - world.agent.x
    dy = gy - world.agent.y
    if dx == 0 and dy == 0:
        return 0.0
    fx, fy = FACING_VECTORS[world.agent.facing]
    rx, ry = FACING_VECTORS[(world.agent.facing + 1) % 4]
    return math.atan2(dx * rx + dy * ry, dx * fx + dy * fy)


def observe(episode: EpisodeState) -> Observation:
    world = episode.world
    spec = episode.spec
    inventory = world.agent.inventory[
        np.fromiter((int(i) for i in spec.observation.inventory_items), dtype=np.int64)
    ].copy()
    angle = compass_angle_to_goal(world) if spec.observation.compass else 0.0
    return Observation(pov=render_pov(world, episode.pack), inventory=inventory,
                       compass_angle=angle)


def advance(episode: EpisodeState, action: int) -> tuple[float, bool, dict]:
    """Advance the episode one tick without rendering; returns
    (reward, done, info). ``info`` carries the raw TickOutcome, the tick
    index, and the items first achieved this tick."""
    if episode.done:
        raise EpisodeOver(f"episode already finished ({episode.done_reason})")
    spec = episode.spec
    world, outcome = step(episode.world, action)
    episode.world = world

    new_items = []
    for raw in outcome.first_acquisitions:
        item = ItemId(raw)
        if item not in episode.achieved:
            episode.achieved.add(item)
            new_items.append(item)

    reward = 0.0
    task = spec.task_id
    if task == TaskId.Treechop:
        gained = sum(c for item, c in outcome.acquired if item == ItemId.Log)
        if gained:
            reward = spec.schedule.milestones[ItemId.Log] * gained
            episode.units_collected += gained
    elif spec.dense_navigation:
        dist = _distance_to_goal(world)
        reward = episode._prev_distance - dist  # exact: both on the 2**-20 grid
        episode._prev_distance = dist
    elif task == TaskId.NavigateSparse:
        pass  # paid on arrival below
    elif spec.schedule is not None:  # Obtain families
        for item in new_items:
            reward += spec.schedule.milestones.get(item, 0.0)

    done_reason = None
    terminal = spec.schedule.terminal_item if spec.schedule else None
    if terminal is not None and terminal in episode.achieved:
        done_reason = "success"
    elif task == TaskId.Treechop and episode.units_collected >= TREECHOP_TARGET_UNITS:
        done_reason = "success"
    elif task in (TaskId.NavigateSparse, TaskId.NavigateDense):
        gx, gy = world.navigate_goal
        if max(abs(gx - world.agent.x), abs(gy - world.agent.y)) <= NAVIGATE_ARRIVAL_RADIUS:
            done_reason = "success"
            if task == TaskId.NavigateSparse:
                reward += NAVIGATE_SPARSE_REWARD
    if done_reason is None and outcome.died:
        done_reason = "death"
    if done_reason is None and world.tick >= spec.tick_cap:
        done_reason = "tick_cap"

    episode.cumulative_score += reward
    if done_reason is not None:
        episode.done = True
        episode.done_reason = done_reason

    info = {"outcome": outcome, "tick": world.tick, "new_milestones": new_items}
    return reward, episode.done, info


def env_step(episode: EpisodeState, action: int
             ) -> tuple[Observation, float, bool, dict]:
    """Advance the episode one tick; returns (observation, reward, done, info)."""
    reward, done, info = advance(episode, action)
    return observe(episode), reward, done, info
