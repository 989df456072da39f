"""Seeded texture packs.

A pack derives every tile from one splitmix64 stream seeded by the pack
seed. Tile order is fixed: the nine cell types in code order, then the
agent tile, then the four animal kinds in code order. Per tile the stream
yields three base-colour draws (one per RGB channel, modulo 256) and then
64 per-pixel brightness offsets (row-major; ``draw % 33 - 16``) added to
all three channels and clamped to [0, 255]. One final draw sets lighting
``0.7 + u * 0.6`` with ``u`` in [0, 1).

Rendering multiplies every channel by the lighting factor, truncating to
integers and clamping at 255; the equivalent 256-entry lookup table is
precomputed here so rendering is a pure gather.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import SplitMix64
from .items import N_CELL_TYPES, AnimalKind

TILE = 8  # tile side in pixels
POV_CELLS = 8  # window side in cells
POV_SIDE = TILE * POV_CELLS  # 64

# Atlas row indices: cell types 0..8, agent, then animal kinds.
AGENT_TILE = N_CELL_TYPES
ANIMAL_TILE_BASE = N_CELL_TYPES + 1
N_TILES = ANIMAL_TILE_BASE + len(AnimalKind)


@dataclass(frozen=True)
class TexturePack:
    pack_id: str
    seed: int
    atlas: np.ndarray  # (N_TILES, 8, 8, 3) uint8
    lighting: float
    lit_atlas: np.ndarray = field(repr=False, default=None)  # lighting pre-applied

    def tile(self, index: int) -> np.ndarray:
        return self.atlas[index]


def pack_id_for_seed(seed: int) -> str:
    return f"{seed & 0xFFFFFFFFFFFFFFFF:016x}"


def make_texture_pack(seed: int) -> TexturePack:
    rng = SplitMix64(seed)
    atlas = np.zeros((N_TILES, TILE, TILE, 3), dtype=np.uint8)
    for t in range(N_TILES):
        base = np.array([rng.next_below(256) for _ in range(3)], dtype=np.int64)
        noise = (rng.fill(TILE * TILE) % np.uint64(33)).astype(np.int64) - 16
        pixels = base[None, :] + noise[:, None]
        atlas[t] = np.clip(pixels, 0, 255).astype(np.uint8).reshape(TILE, TILE, 3)
    lighting = 0.7 + rng.next_float() * 0.6

    lut = np.minimum(np.floor(np.arange(256) * lighting), 255).astype(np.uint8)
    return TexturePack(pack_id=pack_id_for_seed(seed), seed=seed, atlas=atlas,
                       lighting=lighting, lit_atlas=lut[atlas])


def export_atlas(pack: TexturePack) -> bytes:
    """Raw atlas: the nine cell-type tiles concatenated in code order,
    each 8x8x3 row-major uint8."""
    return pack.atlas[:N_CELL_TYPES].tobytes()
