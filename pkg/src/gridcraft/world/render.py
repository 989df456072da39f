"""Egocentric point-of-view rendering.

The camera covers an 8x8-cell window rotated so the agent's facing points
up. The agent sits at window cell (row 4, col 4): four cells of lookahead,
three behind, four to the left, three to the right. For window cell
(wr, wc) the world cell is

    agent + (4 - wr) * forward + (wc - 4) * right

with ``right`` the clockwise perpendicular of ``forward``. Out-of-bounds
cells render as Wall. Live animals inside the window draw their kind tile
over the cell tile (later rows win on overlap) and the agent tile draws at
the centre. The result is a (64, 64, 3) uint8 image with the pack's
lighting already folded in; rendering never touches the state.
"""
from __future__ import annotations

import numpy as np

from .items import CellType, FACING_VECTORS
from .state import ANIMAL_ALIVE, ANIMAL_KIND, ANIMAL_X, ANIMAL_Y, WorldState
from .textures import AGENT_TILE, ANIMAL_TILE_BASE, POV_CELLS, POV_SIDE, TILE, TexturePack

_CENTER = POV_CELLS // 2  # window row/col of the agent


def _right_of(facing: int) -> tuple[int, int]:
    dx, dy = FACING_VECTORS[(facing + 1) % 4]
    return dx, dy


def render_pov(state: WorldState, pack: TexturePack) -> np.ndarray:
    agent = state.agent
    fx, fy = FACING_VECTORS[agent.facing]
    rx, ry = _right_of(agent.facing)
    grid = state.grid
    h, w = grid.shape

    idx = np.empty((POV_CELLS, POV_CELLS), dtype=np.intp)
    for wr in range(POV_CELLS):
        ahead = _CENTER - wr
        bx = agent.x + ahead * fx - _CENTER * rx
        by = agent.y + ahead * fy - _CENTER * ry
        for wc in range(POV_CELLS):
            x = bx + wc * rx
            y = by + wc * ry
            if 0 <= x < w and 0 <= y < h:
                idx[wr, wc] = grid[y, x]
            else:
                idx[wr, wc] = CellType.Wall

    animals = state.animals
    for i in range(animals.shape[0]):
        if animals[i, ANIMAL_ALIVE] != 1:
            continue
        dx = int(animals[i, ANIMAL_X]) - agent.x
        dy = int(animals[i, ANIMAL_Y]) - agent.y
        ahead = dx * fx + dy * fy
        right = dx * rx + dy * ry
        wr = _CENTER - ahead
        wc = _CENTER + right
        if 0 <= wr < POV_CELLS and 0 <= wc < POV_CELLS:
            idx[wr, wc] = ANIMAL_TILE_BASE + int(animals[i, ANIMAL_KIND])

    idx[_CENTER, _CENTER] = AGENT_TILE

    tiles = pack.lit_atlas[idx.ravel()]  # (64, 8, 8, 3)
    img = tiles.reshape(POV_CELLS, POV_CELLS, TILE, TILE, 3)
    return np.ascontiguousarray(img.transpose(0, 2, 1, 3, 4).reshape(POV_SIDE, POV_SIDE, 3))
