"""Acting policies over Observations.

Every learned or baseline policy exposes ``act(observation, explore, rng)``
returning an action code; with ``explore=False`` and fixed parameters the
choice is deterministic. Scripted demonstrators live in ``expert`` and use
the privileged interface instead.
"""
from __future__ import annotations

import numpy as np

from ..rng import SplitMix64
from ..tasks import Observation
from ..world import N_ACTIONS
from .features import featurize
from .nets import DUELING_LAYERS, PLAIN_LAYERS, forward


class RandomPolicy:
    """Uniform over the 16 action codes."""

    params: list[np.ndarray] = []

    def act(self, obs: Observation, explore: bool, rng: SplitMix64) -> int:
        return rng.next_below(N_ACTIONS)


class GreedyNetPolicy:
    """Argmax over network scores; epsilon-greedy when exploring."""

    def __init__(self, params: list[np.ndarray], epsilon: float = 0.0) -> None:
        if len(params) not in (PLAIN_LAYERS, DUELING_LAYERS):
            raise ValueError(f"unsupported parameter count {len(params)}")
        self.params = params
        self.epsilon = epsilon

    def scores(self, features: np.ndarray) -> np.ndarray:
        return forward(self.params, features)

    def act(self, obs: Observation, explore: bool, rng: SplitMix64) -> int:
        if explore and self.epsilon > 0.0 and rng.next_float() < self.epsilon:
            return rng.next_below(N_ACTIONS)
        return int(np.argmax(self.scores(featurize(obs))[0]))


def policy_from_params(params: list[np.ndarray]):
    """Blob contents -> policy; the layer count alone decides the kind
    (0 = uniform random, 6 = plain logits head, 8 = dueling Q head)."""
    if len(params) == 0:
        return RandomPolicy()
    return GreedyNetPolicy(params)
