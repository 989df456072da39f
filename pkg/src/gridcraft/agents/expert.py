"""Scripted demonstrator with privileged world access.

``ScriptedExpert`` reads the full ``WorldState`` (it is a data generator, not
a contestant) and plays one fixed strategy per task family:

  * Treechop: a view-pure rule over the same rotated window the renderer
    draws — attack or face an adjacent tree, close on the nearest visible
    one, otherwise march and deflect.  Because the rule is deterministic, a
    pose revisit without a felling blow proves an orbit; a breadth-first
    rescue then walks to the nearest tree and the view rule resumes.  Keeping
    the action a near-function of the observation is what makes these
    demonstrations learnable by observation-only imitators.
  * Navigate: compass-driven marching — turn toward the needle, deflect
    around obstacles — with the same orbit-proof rescue, here a
    breadth-first path to the goal ring.  View-plus-compass purity matters
    for the same imitation reason as Treechop.
  * Obtain chains: a priority ladder over the recipe graph, recomputed every
    tick from the current inventory — chop wood, craft the tool chain, mine,
    smelt, hunt — so any stray state (spent items, wandering animals) just
    re-plans instead of breaking.

Movement is breadth-first search over Ground cells (ties broken in facing-
vector order, so plans are deterministic); when no all-Ground path exists the
search widens to cells the current tools can mine and the expert digs its way
through. If a needed resource is unreachable even then, the expert wanders
(seeded by the caller's RNG stream) and the episode ends by its tick cap.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..errors import ConfigurationError
from ..rng import SplitMix64
from ..tasks import (
    MEAT_TASK_KIND,
    EpisodeState,
    TaskId,
    compass_angle_to_goal,
    quantised_distance,
)
from ..world import CellType, ItemId
from ..world.items import (
    Action,
    FACING_VECTORS,
    RAW_MEAT,
    best_pickaxe_tier,
    required_hits,
)
from ..world.state import ANIMAL_ALIVE, ANIMAL_KIND, ANIMAL_X, ANIMAL_Y

_GROUND = int(CellType.Ground)
_WALL = int(CellType.Wall)
_TREE = int(CellType.Tree)
_STONE = int(CellType.Stone)
_IRON = int(CellType.IronOreBlock)
_DIAMOND = int(CellType.DiamondOreBlock)
_TABLE = int(CellType.PlacedTable)
_FURNACE = int(CellType.PlacedFurnace)

# Mining hit counts per cell type, by best owned pickaxe tier; mirrors the
# world's tool gating so path search knows what is diggable.
_TURN_FOR_DIFF = {1: int(Action.TurnRight), 2: int(Action.TurnRight),
                  3: int(Action.TurnLeft)}


def _shift_adjacency(mask: np.ndarray, chebyshev: bool) -> np.ndarray:
    """Cells 4-adjacent (or 8-adjacent) to any set cell of ``mask``."""
    adj = np.zeros_like(mask)
    adj[1:, :] |= mask[:-1, :]
    adj[:-1, :] |= mask[1:, :]
    adj[:, 1:] |= mask[:, :-1]
    adj[:, :-1] |= mask[:, 1:]
    if chebyshev:
        adj[1:, 1:] |= mask[:-1, :-1]
        adj[1:, :-1] |= mask[:-1, 1:]
        adj[:-1, 1:] |= mask[1:, :-1]
        adj[:-1, :-1] |= mask[1:, 1:]
    return adj


def _bfs_path(passable: np.ndarray, start: tuple[int, int],
              goal: np.ndarray) -> list[tuple[int, int]] | None:
    """Shortest path over ``passable`` cells from ``start`` to any cell
    flagged in ``goal``; returns the cell list excluding ``start`` ([] when
    already there), or None when unreachable."""
    sx, sy = start
    if goal[sy, sx]:
        return []
    h, w = passable.shape
    parent = np.full((h, w), -1, dtype=np.int32)
    parent[sy, sx] = sy * w + sx  # self-parent marks visited
    frontier = deque(((sx, sy),))
    while frontier:
        x, y = frontier.popleft()
        for dx, dy in FACING_VECTORS:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h):
                continue
            if parent[ny, nx] >= 0 or not passable[ny, nx]:
                continue
            parent[ny, nx] = y * w + x
            if goal[ny, nx]:
                path = [(nx, ny)]
                while (nx, ny) != start:
                    p = parent[ny, nx]
                    nx, ny = p % w, p // w
                    path.append((nx, ny))
                path.reverse()
                return path[1:]
            frontier.append((nx, ny))
    return None


class ScriptedExpert:
    """Privileged per-task demonstrator; see the module docstring."""

    def __init__(self, task_id: TaskId) -> None:
        task_id = TaskId(task_id)
        if task_id == TaskId.Survival:
            raise ConfigurationError(
                "the survival task has no goal to script toward")
        self.task_id = task_id
        self._path: deque = deque()
        self._path_sig: tuple | None = None
        self._seen_poses: set[tuple[int, int, int]] = set()
        self._rescuing = False
        self._best_distance: float | None = None
        self._rescue_entry: float | None = None

    # record() calls this before the first action of every episode.
    def begin_episode(self, episode: EpisodeState) -> None:
        self._path.clear()
        self._path_sig = None
        self._seen_poses.clear()
        self._rescuing = False
        self._best_distance = None
        self._rescue_entry = None

    def act_privileged(self, episode: EpisodeState, rng: SplitMix64) -> int:
        task = self.task_id
        if task == TaskId.Treechop:
            return self._chop_in_view(episode, rng)
        if task in (TaskId.NavigateSparse, TaskId.NavigateDense):
            return self._walk_with_compass(episode, rng)
        if task in MEAT_TASK_KIND:
            return self._meat_ladder(episode, rng, MEAT_TASK_KIND[task])
        return self._tool_ladder(episode, rng,
                                 diamond=task == TaskId.ObtainDiamond)

    # --- treechop -----------------------------------------------------------

    def _chop_in_view(self, ep: EpisodeState, rng: SplitMix64) -> int:
        """One felling step driven by the visible window alone, with a
        breadth-first rescue for the (provably cyclic) stuck cases."""
        reactive = self._visible_tree_step(ep.world)
        if reactive == int(Action.Attack):
            self._rescuing = False
            self._seen_poses.clear()
            return reactive
        agent = ep.world.agent
        pose = (agent.x, agent.y, agent.facing)
        if not self._rescuing and pose in self._seen_poses:
            self._rescuing = True
            self._seen_poses.clear()
        if self._rescuing:
            return self._mine_nearest(ep, rng, (_TREE,))
        self._seen_poses.add(pose)
        return reactive

    def _visible_tree_step(self, world) -> int:
        """Pure function of the agent-centred rotated window (ahead -3..4,
        rightward -4..3, out of bounds reads as Wall): attack or face an
        adjacent tree, else step toward the nearest visible one, else march
        ahead deflecting rightward around obstacles."""
        agent = world.agent
        grid = world.grid
        h, w = grid.shape
        fx, fy = FACING_VECTORS[agent.facing]
        rx, ry = FACING_VECTORS[(agent.facing + 1) % 4]

        animals = world.animals
        occupied = set()
        for i in range(animals.shape[0]):
            if animals[i, ANIMAL_ALIVE] == 1:
                occupied.add((int(animals[i, ANIMAL_X]),
                              int(animals[i, ANIMAL_Y])))

        def cell(a: int, b: int) -> int:
            x = agent.x + a * fx + b * rx
            y = agent.y + a * fy + b * ry
            if 0 <= x < w and 0 <= y < h:
                return int(grid[y, x])
            return _WALL

        def enterable(a: int, b: int) -> bool:
            x = agent.x + a * fx + b * rx
            y = agent.y + a * fy + b * ry
            return (0 <= x < w and 0 <= y < h and int(grid[y, x]) == _GROUND
                    and (x, y) not in occupied)

        if cell(1, 0) == _TREE:
            return int(Action.Attack)
        if cell(0, -1) == _TREE:
            return int(Action.TurnLeft)
        if cell(0, 1) == _TREE:
            return int(Action.TurnRight)
        if cell(-1, 0) == _TREE:
            return int(Action.TurnRight)

        # nearest visible tree; ties prefer small sideways offset, then right
        best = None
        for a in range(-3, 5):
            for b in range(-4, 4):
                if cell(a, b) == _TREE:
                    key = (abs(a) + abs(b), abs(b), b, a)
                    if best is None or key < best:
                        best = key
        if best is not None:
            b, a = best[2], best[3]
            if a > 0 and enterable(1, 0):
                return int(Action.Forward)
            if b < 0 and enterable(0, -1):
                return int(Action.TurnLeft)
            if b > 0 and enterable(0, 1):
                return int(Action.TurnRight)
            if a < 0:
                if enterable(0, 1):
                    return int(Action.TurnRight)
                if enterable(0, -1):
                    return int(Action.TurnLeft)
            if enterable(1, 0):
                return int(Action.Forward)
            if enterable(0, 1):
                return int(Action.TurnRight)
            if enterable(0, -1):
                return int(Action.TurnLeft)
            return int(Action.TurnRight)

        if enterable(1, 0):
            return int(Action.Forward)
        if enterable(0, 1):
            return int(Action.TurnRight)
        if enterable(0, -1):
            return int(Action.TurnLeft)
        return int(Action.TurnRight)

    # --- navigate -----------------------------------------------------------

    def _walk_with_compass(self, ep: EpisodeState, rng: SplitMix64) -> int:
        """March on the compass needle; fall back to a breadth-first path to
        the goal ring whenever the needle-follower provably orbits."""
        world = ep.world
        if world.navigate_goal is None:
            return self._wander(ep, rng)
        gx, gy = world.navigate_goal
        agent = world.agent
        dist = quantised_distance(gx - agent.x, gy - agent.y)
        if self._best_distance is None or dist < self._best_distance:
            self._best_distance = dist  # real progress: orbits start fresh
            self._seen_poses.clear()
        # Hand control back only once the rescue has ratcheted clearly past
        # the blockage; exiting on mere needle alignment thrashes.
        if self._rescuing and dist <= self._rescue_entry - 2.0:
            self._rescuing = False
            self._rescue_entry = None
            self._seen_poses.clear()
        if not self._rescuing:
            pose = (agent.x, agent.y, agent.facing)
            if pose not in self._seen_poses:
                self._seen_poses.add(pose)
                return self._compass_step(world)
            self._rescuing = True
            self._rescue_entry = dist
            self._seen_poses.clear()
        return self._walk_to_goal(ep, rng)

    def _compass_step(self, world) -> int:
        """Pure function of (compass angle, adjacent openness): walk the
        needle, deflecting around whatever blocks the straight line.  Any
        forward-half heading cruises, so diagonal goals become a staircase
        instead of a turn-turn oscillation."""
        angle = compass_angle_to_goal(world)
        ahead_open = self._open_ahead(world, 1, 0)
        if abs(angle) < math.pi / 2 and ahead_open:
            return int(Action.Forward)
        if abs(angle) > math.pi * 3 / 4:
            return int(Action.TurnRight)  # goal behind: swing around
        if angle >= 0 and self._open_ahead(world, 0, 1):
            return int(Action.TurnRight)
        if angle < 0 and self._open_ahead(world, 0, -1):
            return int(Action.TurnLeft)
        if ahead_open:
            return int(Action.Forward)  # preferred turn blocked: slide past
        if self._open_ahead(world, 0, 1):
            return int(Action.TurnRight)
        if self._open_ahead(world, 0, -1):
            return int(Action.TurnLeft)
        return int(Action.TurnRight)

    @staticmethod
    def _open_ahead(world, a: int, b: int) -> bool:
        """Is the cell ``a`` ahead / ``b`` rightward walkable ground?"""
        agent = world.agent
        fx, fy = FACING_VECTORS[agent.facing]
        rx, ry = FACING_VECTORS[(agent.facing + 1) % 4]
        x = agent.x + a * fx + b * rx
        y = agent.y + a * fy + b * ry
        h, w = world.grid.shape
        if not (0 <= x < w and 0 <= y < h) or int(world.grid[y, x]) != _GROUND:
            return False
        animals = world.animals
        for i in range(animals.shape[0]):
            if (animals[i, ANIMAL_ALIVE] == 1 and int(animals[i, ANIMAL_X]) == x
                    and int(animals[i, ANIMAL_Y]) == y):
                return False
        return True

    # --- obtain-chain ladders --------------------------------------------

    def _tool_ladder(self, ep: EpisodeState, rng: SplitMix64,
                     diamond: bool) -> int:
        """One action of the pickaxe chain, choosing the first unmet need."""
        inv = ep.world.agent.inventory
        grid = ep.world.grid
        wood = inv[ItemId.WoodenPickaxe] > 0
        stone = inv[ItemId.StonePickaxe] > 0
        iron = inv[ItemId.IronPickaxe] > 0

        table_placed = bool((grid == _TABLE).any())
        furnace_placed = bool((grid == _FURNACE).any())

        # Remaining raw-material gaps, walking the recipe graph backward.
        ingots_short = 0 if iron else max(0, 3 - int(inv[ItemId.IronIngot]))
        ore_short = max(0, ingots_short - int(inv[ItemId.IronOre]))
        need_table_item = not table_placed and inv[ItemId.CraftingTable] == 0
        need_furnace_item = (ingots_short > 0 and not furnace_placed
                             and inv[ItemId.Furnace] == 0)
        sticks_short = max(0, 2 * (not wood) + 2 * (not stone) + 2 * (not iron)
                           - int(inv[ItemId.Stick]))
        stick_crafts = -(-sticks_short // 4)
        cobble_short = max(0, 3 * (not stone) + 8 * need_furnace_item
                           - int(inv[ItemId.Cobblestone]))
        planks_short = max(0, 3 * (not wood) + 2 * stick_crafts
                           + 4 * need_table_item + ingots_short
                           - int(inv[ItemId.Planks]))
        logs_short = max(0, -(-planks_short // 4) - int(inv[ItemId.Log]))

        if logs_short > 0:
            return self._mine_nearest(ep, rng, (_TREE,))
        if planks_short > 0:
            return int(Action.CraftPlanks)
        if sticks_short > 0:
            return int(Action.CraftStick)
        if need_table_item:
            return int(Action.CraftTable)
        if not table_placed:
            return self._place_on_ground(ep, rng, int(Action.PlaceTable))
        if not wood:
            return self._at_station_do(ep, rng, _TABLE,
                                       int(Action.CraftWoodenPickaxe))
        if cobble_short > 0:
            return self._mine_nearest(ep, rng, (_STONE,))
        if need_furnace_item:
            return self._at_station_do(ep, rng, _TABLE,
                                       int(Action.PlaceFurnace))
        if inv[ItemId.Furnace] > 0 and not furnace_placed:
            return self._place_on_ground(ep, rng, int(Action.PlaceFurnace))
        if not stone:
            return self._at_station_do(ep, rng, _TABLE,
                                       int(Action.CraftStonePickaxe))
        if ore_short > 0:
            return self._mine_nearest(ep, rng, (_IRON,))
        if ingots_short > 0:
            return self._at_station_do(ep, rng, _FURNACE,
                                       int(Action.SmeltIronIngot))
        if not iron:
            return self._at_station_do(ep, rng, _TABLE,
                                       int(Action.CraftIronPickaxe))
        if diamond:
            return self._mine_nearest(ep, rng, (_DIAMOND,))
        return self._wander(ep, rng)

    def _meat_ladder(self, ep: EpisodeState, rng: SplitMix64, kind) -> int:
        inv = ep.world.agent.inventory
        grid = ep.world.grid
        raw = RAW_MEAT[kind]
        wood = inv[ItemId.WoodenPickaxe] > 0
        table_placed = bool((grid == _TABLE).any())
        furnace_placed = bool((grid == _FURNACE).any())

        need_furnace_item = not furnace_placed and inv[ItemId.Furnace] == 0
        need_table_item = not table_placed and inv[ItemId.CraftingTable] == 0
        # SmeltMeat cooks the lowest item code first, so stray kills queue up
        # ahead of the target kind; fuel one plank per smelt until it is done.
        fuel = 1 + sum(int(inv[RAW_MEAT[k]]) for k in RAW_MEAT if k < kind)
        sticks_short = max(0, 2 * (not wood) - int(inv[ItemId.Stick]))
        stick_crafts = -(-sticks_short // 4)
        cobble_short = max(0, 8 * need_furnace_item
                           - int(inv[ItemId.Cobblestone]))
        planks_short = max(0, 3 * (not wood) + 2 * stick_crafts
                           + 4 * need_table_item + fuel
                           - int(inv[ItemId.Planks]))
        logs_short = max(0, -(-planks_short // 4) - int(inv[ItemId.Log]))

        if logs_short > 0:
            return self._mine_nearest(ep, rng, (_TREE,))
        if planks_short > 0:
            return int(Action.CraftPlanks)
        if sticks_short > 0:
            return int(Action.CraftStick)
        if need_table_item:
            return int(Action.CraftTable)
        if not table_placed and (need_furnace_item or not wood):
            return self._place_on_ground(ep, rng, int(Action.PlaceTable))
        if not wood and cobble_short > 0:
            return self._at_station_do(ep, rng, _TABLE,
                                       int(Action.CraftWoodenPickaxe))
        if cobble_short > 0:
            return self._mine_nearest(ep, rng, (_STONE,))
        if need_furnace_item:
            return self._at_station_do(ep, rng, _TABLE,
                                       int(Action.PlaceFurnace))
        if inv[ItemId.Furnace] > 0 and not furnace_placed:
            return self._place_on_ground(ep, rng, int(Action.PlaceFurnace))
        if inv[raw] == 0:
            return self._hunt(ep, rng, kind)
        return self._at_station_do(ep, rng, _FURNACE, int(Action.SmeltMeat))

    # --- navigation subroutines -------------------------------------------

    def _passable_masks(self, ep: EpisodeState):
        """(ground-only, ground-or-diggable) walkability masks."""
        grid = ep.world.grid
        ground = grid == _GROUND
        inv = ep.world.agent.inventory
        diggable = grid == _TREE  # bare hands fell trees
        tier = best_pickaxe_tier(inv)
        if tier >= 1:
            diggable |= grid == _STONE
        if tier >= 2:
            diggable |= grid == _IRON
        if tier >= 3:
            diggable |= grid == _DIAMOND
        return ground, ground | diggable

    def _route_to(self, ep: EpisodeState, sig: tuple,
                  goal: np.ndarray) -> list[tuple[int, int]] | None:
        """Cached two-stage path: Ground-only first, dig-through fallback."""
        agent = ep.world.agent
        pos = (agent.x, agent.y)
        if self._path_sig == sig and self._path:
            if self._path[0] == pos:
                self._path.popleft()
            if self._path:
                nx, ny = self._path[0]
                if (abs(nx - agent.x) + abs(ny - agent.y) == 1
                        and self._cell_enterable(ep, nx, ny)):
                    return list(self._path)
        ground, dig = self._passable_masks(ep)
        path = _bfs_path(ground, pos, goal)
        if path is None:
            path = _bfs_path(dig, pos, goal)
        if path is None:
            self._path_sig = None
            return None
        self._path = deque(path)
        self._path_sig = sig
        return path

    def _cell_enterable(self, ep: EpisodeState, x: int, y: int) -> bool:
        cell = int(ep.world.grid[y, x])
        if cell == _GROUND:
            return True
        return required_hits(cell, ep.world.agent.inventory) is not None

    def _follow_path(self, ep: EpisodeState, rng: SplitMix64) -> int:
        """Emit the turn/move/dig action for the cached path's next cell."""
        agent = ep.world.agent
        nx, ny = self._path[0]
        want = FACING_VECTORS.index((nx - agent.x, ny - agent.y))
        if agent.facing != want:
            return _TURN_FOR_DIFF[(want - agent.facing) % 4]
        if ep.world.grid[ny, nx] == _GROUND:
            return int(Action.Forward)
        return int(Action.Attack)  # dig the blocking cell

    def _act_toward(self, ep: EpisodeState, rng: SplitMix64, sig: tuple,
                    stand: np.ndarray, arrived_action) -> int:
        """Walk to any cell flagged in ``stand``; once standing there, emit
        ``arrived_action()``. Falls back to wandering when unreachable."""
        path = self._route_to(ep, sig, stand)
        if path is None:
            return self._wander(ep, rng)
        if path:
            return self._follow_path(ep, rng)
        return arrived_action()

    def _mine_nearest(self, ep: EpisodeState, rng: SplitMix64,
                      cell_codes: tuple[int, ...]) -> int:
        grid = ep.world.grid
        target = np.isin(grid, cell_codes)
        if not target.any():
            return self._wander(ep, rng)
        stand = _shift_adjacency(target, chebyshev=False)
        return self._act_toward(ep, rng, ("mine",) + cell_codes, stand,
                                lambda: self._face_and_hit(ep, target))

    def _face_and_hit(self, ep: EpisodeState, target: np.ndarray) -> int:
        agent = ep.world.agent
        h, w = target.shape
        for d, (dx, dy) in enumerate(FACING_VECTORS):
            tx, ty = agent.x + dx, agent.y + dy
            if 0 <= tx < w and 0 <= ty < h and target[ty, tx]:
                if agent.facing != d:
                    return _TURN_FOR_DIFF[(d - agent.facing) % 4]
                return int(Action.Attack)
        self._path_sig = None  # target vanished; re-plan next tick
        return int(Action.Noop)

    def _walk_to_goal(self, ep: EpisodeState, rng: SplitMix64) -> int:
        goal = ep.world.navigate_goal
        if goal is None:
            return self._wander(ep, rng)
        gx, gy = goal
        grid = ep.world.grid
        ring = np.zeros(grid.shape, dtype=bool)
        ring[max(0, gy - 1):gy + 2, max(0, gx - 1):gx + 2] = True
        ring &= grid == _GROUND  # arrival counts from any adjacent cell
        return self._act_toward(ep, rng, ("goal", gx, gy), ring,
                                lambda: int(Action.Noop))

    def _at_station_do(self, ep: EpisodeState, rng: SplitMix64,
                       station_cell: int, action: int) -> int:
        stand = _shift_adjacency(ep.world.grid == station_cell, chebyshev=True)
        stand &= ep.world.grid == _GROUND
        return self._act_toward(ep, rng, ("station", station_cell), stand,
                                lambda: action)

    def _place_on_ground(self, ep: EpisodeState, rng: SplitMix64,
                         action: int) -> int:
        """Face some Ground neighbour and emit the placement action."""
        agent = ep.world.agent
        grid = ep.world.grid
        h, w = grid.shape
        fx, fy = agent.faced_cell()
        if 0 <= fx < w and 0 <= fy < h and grid[fy, fx] == _GROUND:
            return action
        for d, (dx, dy) in enumerate(FACING_VECTORS):
            tx, ty = agent.x + dx, agent.y + dy
            if 0 <= tx < w and 0 <= ty < h and grid[ty, tx] == _GROUND:
                return _TURN_FOR_DIFF[(d - agent.facing) % 4]
        return self._wander(ep, rng)  # boxed in: drift until space opens

    def _hunt(self, ep: EpisodeState, rng: SplitMix64, kind) -> int:
        animals = ep.world.animals
        agent = ep.world.agent
        best = None
        for i in range(animals.shape[0]):
            row = animals[i]
            if row[ANIMAL_ALIVE] != 1 or row[ANIMAL_KIND] != int(kind):
                continue
            d = abs(int(row[ANIMAL_X]) - agent.x) + abs(int(row[ANIMAL_Y]) - agent.y)
            if best is None or d < best[0]:
                best = (d, int(row[ANIMAL_X]), int(row[ANIMAL_Y]))
        if best is None:
            return self._wander(ep, rng)  # no live animal of this kind
        _, ax, ay = best
        if (ax, ay) == (agent.x, agent.y):
            # Sharing a cell makes it unattackable; step off and re-approach.
            return self._wander(ep, rng)
        target = np.zeros(ep.world.grid.shape, dtype=bool)
        target[ay, ax] = True
        stand = _shift_adjacency(target, chebyshev=False)
        # The signature pins the animal's cell, so a move forces a re-plan.
        return self._act_toward(ep, rng, ("hunt", int(kind), ax, ay), stand,
                                lambda: self._face_and_hit(ep, target))

    def _wander(self, ep: EpisodeState, rng: SplitMix64) -> int:
        agent = ep.world.agent
        grid = ep.world.grid
        h, w = grid.shape
        fx, fy = agent.faced_cell()
        ahead_ground = (0 <= fx < w and 0 <= fy < h
                        and grid[fy, fx] == _GROUND)
        if ahead_ground and rng.next_below(4) != 0:
            return int(Action.Forward)
        return (int(Action.TurnLeft), int(Action.TurnRight))[rng.next_below(2)]
