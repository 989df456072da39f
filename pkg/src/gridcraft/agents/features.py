"""Observation -> fixed-length feature vector.

Learned policies never see raw world state, only this encoding of an
Observation: inventory counts squashed to [0,1] by 1/64 (clamped), sin/cos
of the compass angle, and a 16x16 grayscale downsample of the 64x64 pov in
[0,1]. With the default 21-item inventory the vector has 21 + 2 + 256 = 279
entries.
"""
from __future__ import annotations

import math

import numpy as np

from ..tasks import Observation

INVENTORY_SCALE = 1.0 / 64.0
DOWNSAMPLE = 16  # grayscale grid side
N_PIXEL_FEATURES = DOWNSAMPLE * DOWNSAMPLE


def feature_length(inventory_len: int) -> int:
    return inventory_len + 2 + N_PIXEL_FEATURES


def pov_to_gray16(pov: np.ndarray) -> np.ndarray:
    """64x64x3 uint8 -> 16x16 grayscale in [0,1] (channel mean, then 4x4
    block average)."""
    gray = pov.astype(np.float64).mean(axis=2) / 255.0
    side = gray.shape[0] // DOWNSAMPLE
    return gray.reshape(DOWNSAMPLE, side, DOWNSAMPLE, side).mean(axis=(1, 3))


def featurize(obs: Observation) -> np.ndarray:
    inv = np.clip(obs.inventory.astype(np.float64) * INVENTORY_SCALE, 0.0, 1.0)
    compass = (math.sin(obs.compass_angle), math.cos(obs.compass_angle))
    return np.concatenate([inv, compass, pov_to_gray16(obs.pov).reshape(-1)])


def featurize_arrays(pov: np.ndarray, inventory: np.ndarray,
                     compass: np.ndarray) -> np.ndarray:
    """Vectorised ``featurize`` over batch arrays (as stored in tuple files)."""
    n = len(pov)
    inv = np.clip(inventory.astype(np.float64) * INVENTORY_SCALE, 0.0, 1.0)
    angle = compass.astype(np.float64)
    gray = pov.astype(np.float64).mean(axis=3) / 255.0
    side = gray.shape[1] // DOWNSAMPLE
    gray = gray.reshape(n, DOWNSAMPLE, side, DOWNSAMPLE, side).mean(axis=(2, 4))
    return np.concatenate(
        [inv, np.sin(angle)[:, None], np.cos(angle)[:, None],
         gray.reshape(n, -1)], axis=1)
