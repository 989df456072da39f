"""Shared fixtures and hand-built world helpers."""
from __future__ import annotations

import numpy as np
import pytest

from gridcraft.world import (
    AgentState,
    CellType,
    Facing,
    GenConfig,
    WorldState,
    make_texture_pack,
)


def flat_world(side: int = 16, facing: int = Facing.North,
               agent_at: tuple[int, int] = (8, 8),
               animals: list[tuple[int, int, int]] | None = None) -> WorldState:
    """All-Ground bordered world with a known agent pose and no RNG noise."""
    grid = np.full((side, side), CellType.Wall, dtype=np.uint8)
    grid[1:side - 1, 1:side - 1] = CellType.Ground
    rows = np.array([(k, x, y, 1) for k, x, y in (animals or [])],
                    dtype=np.int32).reshape(-1, 4)
    return WorldState(grid, AgentState(agent_at[0], agent_at[1], facing=facing),
                      rows, tick=0, rng_state=0)


@pytest.fixture(scope="session")
def pack():
    return make_texture_pack(1)


@pytest.fixture(scope="session")
def pack_b():
    return make_texture_pack(2)


@pytest.fixture(scope="session")
def default_gen():
    return GenConfig()
