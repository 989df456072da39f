"""Q-learning baselines: DQN and its demonstration-pretrained variant.

Both train the dueling head with double-Q targets

    r + discount * Q_target(s', argmax_a Q_online(s', a)) * (1 - done)

under Huber loss, interacting through a budget-metered environment that
charges one unit per reset and per step. The pretrained variant first runs
``pretrain_updates`` Bellman updates on demonstration transitions alone
(consuming zero environment samples), keeps those transitions in the replay
ring where fresh experience may eventually overwrite them, then continues
exactly like plain DQN.

Every source of randomness (net init, exploration, batch sampling, episode
seeds, curve-evaluation seeds) derives from the one training seed, so a
(seed, config, corpus) triple reproduces the learning curve bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import export_tuples, read_tuples, tuple_path
from ..errors import BudgetExhausted, ConfigurationError
from ..evaluation import Budget, BudgetedEnv, run_evaluation
from ..rng import SplitMix64, splitmix64
from ..tasks import TaskSpec
from ..world import N_ACTIONS, N_ITEMS, TexturePack
from .features import feature_length, featurize, featurize_arrays
from .nets import Adam, clip_global_norm, forward, huber_q_grads, init_dueling
from .policy import GreedyNetPolicy

# Distinguishes the curve-evaluation seed stream from the episode stream.
_CURVE_SEED_SALT = 0x517CC1B727220A95


@dataclass(frozen=True)
class TrainConfig:
    discount: float = 0.99
    learning_rate: float = 1e-3
    batch_size: int = 32
    target_sync_every: int = 1000   # updates between target-net refreshes
    epsilon_start: float = 1.0
    epsilon_final: float = 0.05
    epsilon_fraction: float = 0.2   # budget share over which epsilon anneals
    pretrain_updates: int = 10_000
    buffer_capacity: int = 100_000
    grad_clip: float = 10.0
    warmup: int = 1000              # buffered transitions before updates start
    train_every: int = 4            # env steps between gradient updates
    curve_every: int = 5000         # samples between learning-curve points
    curve_episodes: int = 5

    def validate(self) -> None:
        if not 0.0 < self.discount < 1.0:
            raise ConfigurationError(
                f"discount must lie in (0, 1), got {self.discount}")
        positives = {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "target_sync_every": self.target_sync_every,
            "buffer_capacity": self.buffer_capacity,
            "grad_clip": self.grad_clip,
            "warmup": self.warmup,
            "train_every": self.train_every,
            "curve_every": self.curve_every,
            "curve_episodes": self.curve_episodes,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        if self.pretrain_updates < 0:
            raise ConfigurationError("pretrain_updates must be non-negative")
        if not 0.0 <= self.epsilon_final <= self.epsilon_start <= 1.0:
            raise ConfigurationError("need 0 <= epsilon_final <= epsilon_start <= 1")
        if not 0.0 < self.epsilon_fraction <= 1.0:
            raise ConfigurationError("epsilon_fraction must lie in (0, 1]")
        if self.buffer_capacity < self.batch_size:
            raise ConfigurationError("buffer must hold at least one batch")


class ReplayBuffer:
    """Fixed-capacity transition ring with demonstration bookkeeping."""

    def __init__(self, capacity: int, feature_len: int) -> None:
        self.capacity = capacity
        self.features = np.zeros((capacity, feature_len), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.uint8)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.next_features = np.zeros((capacity, feature_len), dtype=np.float32)
        self.dones = np.zeros(capacity, dtype=np.float32)
        self.is_demo = np.zeros(capacity, dtype=bool)
        self.size = 0
        self.cursor = 0
        self.demo_count = 0

    def add(self, feature, action, reward, next_feature, done: bool,
            demo: bool = False) -> None:
        i = self.cursor
        if self.size == self.capacity and self.is_demo[i]:
            self.demo_count -= 1  # overwriting an old demonstration
        self.features[i] = feature
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_features[i] = next_feature
        self.dones[i] = 1.0 if done else 0.0
        self.is_demo[i] = demo
        if demo:
            self.demo_count += 1
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, batch_size: int):
        """Uniform without replacement within the batch."""
        idx = rng.choice(self.size, size=batch_size, replace=False,
                         shuffle=False)
        return (self.features[idx].astype(np.float64),
                self.actions[idx].astype(np.int64),
                self.rewards[idx].astype(np.float64),
                self.next_features[idx].astype(np.float64),
                self.dones[idx].astype(np.float64))


def demo_transitions(root, trajectory_ids: list[str], pack: TexturePack,
                     spec: TaskSpec | None = None):
    """Yield (feature, action, reward, next_feature, done) per stored tick.

    Consecutive tuple rows pair into transitions; a trajectory's final row
    contributes one only if the episode actually ended there (done set), in
    which case the successor features are zeros and never bootstrapped.
    """
    for tid in trajectory_ids:
        path = tuple_path(root, tid, pack)
        if not path.exists():
            export_tuples(root, tid, pack, spec)
        _, rows = read_tuples(path)
        if len(rows) == 0:
            continue
        batch = featurize_arrays(
            np.ascontiguousarray(rows["pov"]).reshape(-1, 64, 64, 3),
            rows["inventory"], rows["compass"])
        actions = rows["action"]
        rewards = rows["reward"]
        dones = rows["done"]
        for i in range(len(rows) - 1):
            yield (batch[i], int(actions[i]), float(rewards[i]),
                   batch[i + 1], bool(dones[i]))
        if dones[-1]:
            yield (batch[-1], int(actions[-1]), float(rewards[-1]),
                   np.zeros_like(batch[-1]), True)


def _update(params, target, opt, buffer, config, rng):
    f, a, r, nf, done = buffer.sample(rng, config.batch_size)
    online_next = forward(params, nf)
    best = online_next.argmax(axis=1)
    target_next = forward(target, nf)
    targets = r + config.discount * target_next[np.arange(len(best)), best] \
        * (1.0 - done)
    loss, grads = huber_q_grads(params, f, a, targets)
    clip_global_norm(grads, config.grad_clip)
    opt.apply(params, grads)
    return loss


def _evaluate_point(params, spec, curve_seeds, pack) -> float:
    report = run_evaluation(GreedyNetPolicy(params), spec, curve_seeds, pack)
    return report.mean


def _train(spec: TaskSpec, budget: int, config: TrainConfig, seed: int,
           pack: TexturePack | None, buffer: ReplayBuffer | None
           ) -> tuple[GreedyNetPolicy, list[tuple[int, float]]]:
    """The shared interaction loop; ``buffer`` may arrive demo-prefilled."""
    feature_len = feature_length(N_ITEMS)
    if buffer is None:
        buffer = ReplayBuffer(config.buffer_capacity, feature_len)
    params = init_dueling(feature_len, seed)
    target = [p.copy() for p in params]
    opt = Adam(learning_rate=config.learning_rate)
    rng = np.random.Generator(np.random.PCG64(seed))
    episode_seeds = SplitMix64(splitmix64(seed))
    curve_stream = SplitMix64(splitmix64(seed) ^ _CURVE_SEED_SALT)
    curve_seeds = [curve_stream.next_u64()
                   for _ in range(config.curve_episodes)]

    updates = 0
    # Demonstration pretraining: Bellman updates before any env contact.
    for _ in range(config.pretrain_updates if buffer.demo_count else 0):
        _update(params, target, opt, buffer, config, rng)
        updates += 1
        if updates % config.target_sync_every == 0:
            target = [p.copy() for p in params]

    meter = Budget(budget)
    env = BudgetedEnv(spec, meter, pack)
    curve: list[tuple[int, float]] = []
    next_curve_at = config.curve_every
    anneal_over = max(1, int(config.epsilon_fraction * budget))
    steps = 0
    feature = None

    def maybe_curve_point() -> None:
        nonlocal next_curve_at
        if meter.consumed >= next_curve_at:
            curve.append((meter.consumed,
                          _evaluate_point(params, spec, curve_seeds, pack)))
            next_curve_at += config.curve_every

    try:
        feature = featurize(env.reset(episode_seeds.next_u64()))
        maybe_curve_point()
        while True:
            epsilon = max(
                config.epsilon_final,
                config.epsilon_start
                - (config.epsilon_start - config.epsilon_final)
                * meter.consumed / anneal_over)
            if rng.random() < epsilon:
                action = int(rng.integers(N_ACTIONS))
            else:
                action = int(forward(params, feature).argmax())
            obs, reward, done, _ = env.step(action)
            next_feature = featurize(obs)
            buffer.add(feature, action, reward, next_feature, done)
            steps += 1
            if buffer.size >= config.warmup and steps % config.train_every == 0:
                _update(params, target, opt, buffer, config, rng)
                updates += 1
                if updates % config.target_sync_every == 0:
                    target = [p.copy() for p in params]
            maybe_curve_point()
            if done:
                feature = featurize(env.reset(episode_seeds.next_u64()))
                maybe_curve_point()
            else:
                feature = next_feature
    except BudgetExhausted:
        pass  # train to the last sample, then finalize

    if not curve or curve[-1][0] != meter.consumed:
        curve.append((meter.consumed,
                      _evaluate_point(params, spec, curve_seeds, pack)))
    return GreedyNetPolicy(params), curve


def train_dqn(spec: TaskSpec, budget: int, config: TrainConfig | None = None,
              seed: int = 0, pack: TexturePack | None = None
              ) -> tuple[GreedyNetPolicy, list[tuple[int, float]]]:
    """Train from scratch; returns the greedy policy and its learning curve
    of (samples_consumed, mean curve-eval score) points."""
    config = TrainConfig() if config is None else config
    config.validate()
    if budget <= config.warmup:
        raise ConfigurationError(
            f"budget {budget} cannot cover the {config.warmup}-sample warmup")
    return _train(spec, budget, config, seed, pack, buffer=None)


def train_predqn(spec: TaskSpec, root, trajectory_ids: list[str],
                 budget: int, config: TrainConfig | None = None,
                 seed: int = 0, pack: TexturePack | None = None
                 ) -> tuple[GreedyNetPolicy, list[tuple[int, float]]]:
    """DQN whose replay ring starts full of demonstration transitions and
    whose net is pretrained on them before touching the environment."""
    config = TrainConfig() if config is None else config
    config.validate()
    if budget <= config.warmup:
        raise ConfigurationError(
            f"budget {budget} cannot cover the {config.warmup}-sample warmup")
    if not trajectory_ids:
        raise ConfigurationError(
            "demonstration pretraining needs a non-empty corpus")
    if pack is None:
        raise ConfigurationError(
            "demonstration pretraining needs the texture pack the tuples "
            "were rendered with")
    buffer = ReplayBuffer(config.buffer_capacity, feature_length(N_ITEMS))
    for feature, action, reward, next_feature, done in demo_transitions(
            root, trajectory_ids, pack, spec):
        buffer.add(feature, action, reward, next_feature, done, demo=True)
    if buffer.size < config.batch_size:
        raise ConfigurationError(
            f"the demonstration corpus yields {buffer.size} transitions, "
            f"fewer than one batch of {config.batch_size}")
    return _train(spec, budget, config, seed, pack, buffer)
