"""POV rendering and texture packs."""
from __future__ import annotations

import numpy as np

from conftest import flat_world
from gridcraft.world import (
    CellType,
    Facing,
    make_texture_pack,
    render_pov,
    state_hash,
)
from gridcraft.world.textures import (
    AGENT_TILE,
    N_CELL_TYPES,
    N_TILES,
    export_atlas,
    pack_id_for_seed,
)


class TestTexturePack:
    def test_same_seed_same_pack(self):
        a, b = make_texture_pack(7), make_texture_pack(7)
        assert np.array_equal(a.atlas, b.atlas)
        assert a.lighting == b.lighting
        assert a.pack_id == b.pack_id == pack_id_for_seed(7)

    def test_different_seeds_differ(self):
        a, b = make_texture_pack(1), make_texture_pack(2)
        assert not np.array_equal(a.atlas, b.atlas)

    def test_lighting_range(self):
        for seed in range(50):
            light = make_texture_pack(seed).lighting
            assert 0.7 <= light < 1.3

    def test_atlas_export_covers_cell_types(self):
        pack = make_texture_pack(3)
        raw = export_atlas(pack)
        assert len(raw) == N_CELL_TYPES * 8 * 8 * 3
        assert raw == pack.atlas[:N_CELL_TYPES].tobytes()

    def test_atlas_has_entity_tiles(self):
        pack = make_texture_pack(3)
        assert pack.atlas.shape == (N_TILES, 8, 8, 3)

    def test_pack_id_fits_sixteen_bytes(self):
        assert len(pack_id_for_seed(2**64 - 1).encode()) == 16


class TestRenderPov:
    def test_shape_and_dtype(self, pack):
        img = render_pov(flat_world(), pack)
        assert img.shape == (64, 64, 3) and img.dtype == np.uint8

    def test_same_state_same_image(self, pack):
        a = render_pov(flat_world(), pack)
        b = render_pov(flat_world(), pack)
        assert np.array_equal(a, b)

    def test_packs_change_pixels_only(self, pack, pack_b):
        w = flat_world()
        h_before = state_hash(w)
        img1 = render_pov(w, pack)
        img2 = render_pov(w, pack_b)
        assert not np.array_equal(img1, img2)
        assert state_hash(w) == h_before  # rendering is pure

    def test_agent_tile_sits_at_centre(self, pack):
        img = render_pov(flat_world(), pack)
        centre = img[32:40, 32:40]
        assert np.array_equal(centre, pack.lit_atlas[AGENT_TILE])

    def test_out_of_bounds_renders_as_wall(self, pack):
        w = flat_world(agent_at=(1, 1), facing=Facing.North)
        img = render_pov(w, pack)
        # the top-left window cells lie beyond the border -> wall tile
        wall = pack.lit_atlas[int(CellType.Wall)]
        assert np.array_equal(img[0:8, 0:8], wall)

    def test_facing_rotates_window(self, pack):
        # A tree one cell north of the agent must appear directly above the
        # centre whenever the agent faces it, whatever the world direction.
        for facing, delta in ((Facing.North, (0, -1)), (Facing.East, (1, 0)),
                              (Facing.South, (0, 1)), (Facing.West, (-1, 0))):
            w = flat_world(facing=facing)
            w.grid[8 + delta[1], 8 + delta[0]] = CellType.Tree
            img = render_pov(w, pack)
            ahead = img[24:32, 32:40]  # window cell (3, 4): one step forward
            assert np.array_equal(ahead, pack.lit_atlas[int(CellType.Tree)]), facing

    def test_lighting_scales_channels(self):
        # Two packs sharing tiles but not lighting: force it by hand.
        from dataclasses import replace

        base = make_texture_pack(11)
        unit_lut = np.minimum(np.floor(np.arange(256) * 1.0), 255).astype(np.uint8)
        dim_lut = np.minimum(np.floor(np.arange(256) * 0.7), 255).astype(np.uint8)
        bright = replace(base, lighting=1.0, lit_atlas=unit_lut[base.atlas])
        dim = replace(base, lighting=0.7, lit_atlas=dim_lut[base.atlas])
        w = flat_world()
        img_bright = render_pov(w, bright)
        img_dim = render_pov(w, dim)
        expected = np.minimum(np.floor(img_bright * 0.7), 255).astype(np.uint8)
        assert np.array_equal(img_dim, expected)

    def test_animal_tile_rendered_in_window(self, pack):
        w = flat_world(facing=Facing.North, animals=[(3, 8, 6)])  # pig, 2 ahead
        img = render_pov(w, pack)
        from gridcraft.world.textures import ANIMAL_TILE_BASE

        cell = img[16:24, 32:40]  # window cell (2, 4)
        assert np.array_equal(cell, pack.lit_atlas[ANIMAL_TILE_BASE + 3])
