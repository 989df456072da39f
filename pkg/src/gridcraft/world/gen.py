"""Seeded world generation.

Draw order (one splitmix64 stream per world, seeded by the world seed):

1. one draw per interior cell, row-major, assigning the cell type by
   cumulative density thresholds (tree, stone, iron, diamond, water);
2. one draw for the agent spawn cell (uniform over Ground cells) and one
   for its initial facing;
3. per animal: one draw for the kind, one for the spawn cell (uniform over
   Ground cells, overlaps allowed).

The stream state left after these draws is stored on the world and later
consumed by animal movement, one draw per live animal every fourth tick.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..errors import ConfigurationError
from ..rng import SplitMix64
from .items import CellType
from .state import AgentState, WorldState

MAX_ANIMALS = 8


@dataclass(frozen=True)
class GenConfig:
    """Flat generation parameters. Densities are independent per-cell
    probabilities over the interior (non-border) area, so expected resource
    counts are proportional to them; defaults keep diamond ore twenty times
    rarer than iron ore."""

    side: int = 64
    tree_density: float = 0.10
    stone_density: float = 0.10
    iron_density: float = 0.04
    diamond_density: float = 0.002
    water_density: float = 0.05
    animal_count: int = 8

    def validate(self) -> None:
        if self.side < 16:
            raise ConfigurationError(f"side must be >= 16, got {self.side}")
        densities = (self.tree_density, self.stone_density, self.iron_density,
                     self.diamond_density, self.water_density)
        for name, d in zip(("tree", "stone", "iron", "diamond", "water"), densities):
            if not (0.0 <= d <= 1.0):
                raise ConfigurationError(f"{name}_density must lie in [0, 1], got {d}")
        if sum(densities) > 1.0:
            raise ConfigurationError("densities must sum to at most 1")
        if not (0 <= self.animal_count <= MAX_ANIMALS):
            raise ConfigurationError(
                f"animal_count must lie in [0, {MAX_ANIMALS}], got {self.animal_count}")


def parse_config_text(text: str, cls=GenConfig):
    """Parse a flat ``key = value`` config file into ``cls`` (skips blank
    lines and ``#`` comments; unknown keys are configuration errors)."""
    field_types = {f.name: f.type for f in fields(cls)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in field_types:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(val) if field_types[key] == "int" else float(val)
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return cls(**values)


def generate_world(seed: int, config: GenConfig) -> WorldState:
    """Build a bordered world from ``seed`` under ``config``."""
    config.validate()
    side = config.side
    rng = SplitMix64(seed)

    interior = side - 2
    draws = rng.fill(interior * interior)
    u = (draws >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    t1 = config.tree_density
    t2 = t1 + config.stone_density
    t3 = t2 + config.iron_density
    t4 = t3 + config.diamond_density
    t5 = t4 + config.water_density

    cells = np.full(interior * interior, CellType.Ground, dtype=np.uint8)
    cells[u < t5] = CellType.Water
    cells[u < t4] = CellType.DiamondOreBlock
    cells[u < t3] = CellType.IronOreBlock
    cells[u < t2] = CellType.Stone
    cells[u < t1] = CellType.Tree

    grid = np.full((side, side), CellType.Wall, dtype=np.uint8)
    grid[1:side - 1, 1:side - 1] = cells.reshape(interior, interior)

    ys, xs = np.nonzero(grid == CellType.Ground)
    if len(xs) == 0:
        raise ConfigurationError("no Ground cell available for the agent spawn")

    spawn = rng.next_below(len(xs))
    agent = AgentState(int(xs[spawn]), int(ys[spawn]), facing=rng.next_below(4))

    animals = np.zeros((config.animal_count, 4), dtype=np.int32)
    for i in range(config.animal_count):
        kind = rng.next_below(4)
        at = rng.next_below(len(xs))
        animals[i] = (kind, int(xs[at]), int(ys[at]), 1)

    return WorldState(grid, agent, animals, tick=0, rng_state=rng.state)
