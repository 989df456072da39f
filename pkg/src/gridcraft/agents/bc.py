"""Behavioural cloning: supervised action prediction from stored tuples.

Trains the plain logits head with softmax cross-entropy against the actions
players actually took. Batches stream out of the dataset store; the epoch
order is pinned by ``shuffle_seed + epoch``, so a (corpus, config) pair
always reproduces the same parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import load_batches
from ..errors import ConfigurationError
from ..tasks import TaskSpec
from ..world import N_ITEMS, TexturePack
from .features import feature_length, featurize_arrays
from .nets import Adam, clip_global_norm, cross_entropy_grads, init_plain
from .policy import GreedyNetPolicy


@dataclass(frozen=True)
class BCConfig:
    epochs: int = 5
    batch_size: int = 32
    learning_rate: float = 1e-3
    grad_clip: float = 10.0
    init_seed: int = 0
    shuffle_seed: int = 0

    def validate(self) -> None:
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ConfigurationError("epochs and batch_size must be positive")
        if self.learning_rate <= 0 or self.grad_clip <= 0:
            raise ConfigurationError(
                "learning_rate and grad_clip must be positive")


def train_bc(root, trajectory_ids: list[str], pack: TexturePack,
             config: BCConfig | None = None, spec: TaskSpec | None = None
             ) -> tuple[GreedyNetPolicy, list[float]]:
    """Fit the cloning policy on the listed trajectories.

    Returns the greedy policy plus the mean training loss per epoch.
    """
    config = BCConfig() if config is None else config
    config.validate()
    if not trajectory_ids:
        raise ConfigurationError("behavioural cloning needs a non-empty corpus")

    params = init_plain(feature_length(N_ITEMS), config.init_seed)
    opt = Adam(learning_rate=config.learning_rate)
    epoch_losses: list[float] = []
    for epoch in range(config.epochs):
        losses = []
        sizes = []
        for batch in load_batches(root, trajectory_ids, pack,
                                  config.batch_size,
                                  config.shuffle_seed + epoch, spec):
            x = featurize_arrays(batch.pov, batch.inventory, batch.compass)
            loss, grads = cross_entropy_grads(params, x,
                                              batch.actions.astype(np.int64))
            clip_global_norm(grads, config.grad_clip)
            opt.apply(params, grads)
            losses.append(loss)
            sizes.append(len(batch))
        epoch_losses.append(float(np.average(losses, weights=sizes)))
    return GreedyNetPolicy(params), epoch_losses
