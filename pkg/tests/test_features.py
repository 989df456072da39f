"""Feature-encoding oracles: layout, scaling, downsampling, batch parity."""
from __future__ import annotations

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gridcraft.agents import (
    feature_length,
    featurize,
    featurize_arrays,
    pov_to_gray16,
)
from gridcraft.tasks import Observation
from gridcraft.world import ItemId, N_ITEMS


def obs_with(pov_value: int = 0, compass: float = 0.0, **counts) -> Observation:
    pov = np.full((64, 64, 3), pov_value, dtype=np.uint8)
    inv = np.zeros(N_ITEMS, dtype=np.uint16)
    for name, c in counts.items():
        inv[ItemId[name]] = c
    return Observation(pov=pov, inventory=inv, compass_angle=compass)


class TestGrayDownsample:
    def test_constant_image_maps_to_constant_gray(self):
        assert (pov_to_gray16(np.full((64, 64, 3), 255, np.uint8)) == 1.0).all()
        assert (pov_to_gray16(np.zeros((64, 64, 3), np.uint8)) == 0.0).all()

    def test_one_bright_block_lands_in_one_cell(self):
        pov = np.zeros((64, 64, 3), dtype=np.uint8)
        pov[0:4, 0:4] = 255  # exactly the top-left 4x4 block
        gray = pov_to_gray16(pov)
        assert gray[0, 0] == 1.0
        assert gray.sum() == 1.0

    def test_channels_average_before_downsampling(self):
        pov = np.zeros((64, 64, 3), dtype=np.uint8)
        pov[:, :, 0] = 255  # pure red everywhere
        gray = pov_to_gray16(pov)
        # (255 + 0 + 0)/3 = 85, then /255
        assert (gray == 85.0 / 255.0).all()

    def test_shape_and_range(self):
        rng = np.random.Generator(np.random.PCG64(5))
        pov = rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
        gray = pov_to_gray16(pov)
        assert gray.shape == (16, 16)
        assert gray.min() >= 0.0 and gray.max() <= 1.0


class TestFeaturize:
    def test_length_matches_inventory_plus_compass_plus_pixels(self):
        assert feature_length(21) == 279
        assert featurize(obs_with()).shape == (279,)

    def test_inventory_slice_is_counts_over_64(self):
        vec = featurize(obs_with(Log=32, Planks=64))
        assert vec[int(ItemId.Log)] == 0.5
        assert vec[int(ItemId.Planks)] == 1.0

    def test_inventory_clamps_at_one(self):
        vec = featurize(obs_with(Cobblestone=1000))
        assert vec[int(ItemId.Cobblestone)] == 1.0

    def test_compass_encoded_as_sin_cos(self):
        vec = featurize(obs_with(compass=math.pi / 2))
        assert vec[N_ITEMS] == math.sin(math.pi / 2) == 1.0
        assert vec[N_ITEMS + 1] == math.cos(math.pi / 2)

    def test_pixels_fill_the_tail(self):
        vec = featurize(obs_with(pov_value=255))
        assert (vec[N_ITEMS + 2:] == 1.0).all()

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_every_entry_lies_in_minus_one_one(self, seed):
        rng = np.random.Generator(np.random.PCG64(seed))
        obs = Observation(
            pov=rng.integers(0, 256, (64, 64, 3), dtype=np.uint8),
            inventory=rng.integers(0, 300, N_ITEMS, dtype=np.uint16),
            compass_angle=float(rng.uniform(-math.pi, math.pi)),
        )
        vec = featurize(obs)
        assert vec.shape == (feature_length(N_ITEMS),)
        assert vec.min() >= -1.0 and vec.max() <= 1.0


class TestFeaturizeArrays:
    def test_matches_single_featurize_row_by_row(self):
        rng = np.random.Generator(np.random.PCG64(11))
        n = 6
        pov = rng.integers(0, 256, (n, 64, 64, 3), dtype=np.uint8)
        inv = rng.integers(0, 200, (n, N_ITEMS), dtype=np.uint16)
        compass = rng.uniform(-math.pi, math.pi, n).astype(np.float32)
        batch = featurize_arrays(pov, inv, compass)
        assert batch.shape == (n, feature_length(N_ITEMS))
        for i in range(n):
            single = featurize(Observation(pov[i], inv[i], float(compass[i])))
            np.testing.assert_array_equal(batch[i], single)
