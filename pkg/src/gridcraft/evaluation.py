"""Scoring harness: sample budgets, seed vaults, evaluation, and ranking.

An evaluation runs a frozen policy over a fixed list of hidden episode seeds
(the "vault") with exploration off, sums milestone rewards per episode, and
reports mean/std plus the tie-break statistic: the 1-based index of the first
episode in which the best milestone attained *anywhere* in the run was first
attained (0 when no milestone was ever hit). Rankings sort by mean score
descending, breaking exact ties by smaller tie-break episode, with 0 (no
milestone) ranking last among tied means.

Training-time environment access goes through ``BudgetedEnv``, which meters
every reset and step against a shared ``Budget``; evaluation rollouts use the
unmetered task API and therefore never consume budget.

Render-variant sets bundle three texture packs (development / validation /
final evaluation) with three pairwise-disjoint seed vaults derived from one
master seed; the development materials are shareable, the rest are meant to
stay hidden.

Seed vault file format (little-endian): magic ``MRLV``, u16 version=1,
u32 count, then count u64 seeds.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BudgetExhausted,
    ComparisonError,
    ConfigurationError,
    CorruptLog,
    IncompatibleVersion,
)
from .rng import SplitMix64, actor_stream, fnv1a64, splitmix64
from .tasks import (
    EpisodeState,
    Observation,
    TaskSpec,
    advance,
    begin,
    env_step,
    observe,
    reset,
    spec_digest,
)
from .world import TexturePack, make_texture_pack

VAULT_MAGIC = b"MRLV"
VAULT_VERSION = 1
_VAULT_HEADER = struct.Struct("<4sHI")

DEFAULT_EVAL_EPISODES = 100
DEFAULT_SAMPLE_BUDGET = 1_000_000


@dataclass
class Budget:
    """Counter of environment samples a training run is allowed to draw."""

    max_env_samples: int = DEFAULT_SAMPLE_BUDGET
    consumed: int = 0

    def __post_init__(self) -> None:
        if self.max_env_samples <= 0:
            raise ConfigurationError(
                f"sample budget must be positive, got {self.max_env_samples}")

    @property
    def remaining(self) -> int:
        return self.max_env_samples - self.consumed

    def consume(self) -> None:
        if self.consumed >= self.max_env_samples:
            raise BudgetExhausted(
                f"all {self.max_env_samples} environment samples are spent")
        self.consumed += 1


class BudgetedEnv:
    """Task environment that charges one budget unit per reset and per step,
    and is otherwise observationally identical to the unmetered API."""

    def __init__(self, spec: TaskSpec, budget: Budget,
                 pack: TexturePack | None = None) -> None:
        self.spec = spec
        self.budget = budget
        self.pack = pack
        self.episode: EpisodeState | None = None

    def reset(self, seed: int) -> Observation:
        self.budget.consume()
        self.episode, obs = reset(self.spec, seed, self.pack)
        return obs

    def step(self, action: int) -> tuple[Observation, float, bool, dict]:
        if self.episode is None:
            raise ConfigurationError("step before the first reset")
        self.budget.consume()
        return env_step(self.episode, action)


@dataclass(frozen=True)
class ScoreReport:
    """Outcome of one policy over one seed vault."""

    per_episode_scores: tuple[float, ...]
    mean: float
    std: float
    tie_break_episode: int
    samples_consumed_training: int = 0
    eval_id: int = 0  # digest of (task, pack, seeds); guards compare()


def _eval_id(spec: TaskSpec, pack_id: str, seeds) -> int:
    blob = struct.pack("<Q", spec_digest(spec)) + pack_id.encode("ascii")
    blob += b"".join(struct.pack("<Q", int(s) & 0xFFFFFFFFFFFFFFFF)
                     for s in seeds)
    return fnv1a64(blob)


def run_evaluation(policy, spec: TaskSpec, seeds,
                   pack: TexturePack | None = None,
                   samples_consumed: int = 0) -> ScoreReport:
    """Score ``policy`` over ``seeds`` with exploration off.

    ``policy`` uses the same dual interface as recording: ``act_privileged``
    for full-state scripted players, else ``act`` on rendered observations.
    Per-episode scores equal what record-then-annotate reports for the same
    policy and seed, because both derive the actor RNG stream from the
    episode seed the same way.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigurationError("evaluation needs at least one seed")
    privileged = hasattr(policy, "act_privileged")
    scores: list[float] = []
    schedule = spec.schedule.milestones if spec.schedule is not None else {}
    first_attained: dict = {}  # milestone item -> episode number (1-based)

    for number, seed in enumerate(seeds, start=1):
        episode = begin(spec, seed, pack)
        hook = getattr(policy, "begin_episode", None)
        if hook is not None:
            hook(episode)
        rng = actor_stream(seed)
        if privileged:
            while not episode.done:
                action = policy.act_privileged(episode, rng)
                _, _, info = advance(episode, action)
                for item in info["new_milestones"]:
                    if item in schedule:
                        first_attained.setdefault(item, number)
        else:
            obs = observe(episode)
            while not episode.done:
                action = policy.act(obs, False, rng)
                _, _, info = advance(episode, action)
                for item in info["new_milestones"]:
                    if item in schedule:
                        first_attained.setdefault(item, number)
                if not episode.done:
                    obs = observe(episode)
        scores.append(episode.cumulative_score)

    if first_attained:
        best = max(first_attained, key=lambda it: (schedule[it], int(it)))
        tie_break = first_attained[best]
    else:
        tie_break = 0
    arr = np.asarray(scores, dtype=np.float64)
    pack_id = pack.pack_id if pack is not None else ""
    return ScoreReport(
        per_episode_scores=tuple(float(s) for s in scores),
        mean=float(arr.mean()),
        std=float(arr.std()),
        tie_break_episode=tie_break,
        samples_consumed_training=samples_consumed,
        eval_id=_eval_id(spec, pack_id, seeds),
    )


def compare(entries: list[ScoreReport]) -> list[int]:
    """1-based ranks for ``entries`` (rank 1 = best), in input order.

    Descending mean; exact mean ties break toward the smaller positive
    tie_break_episode, with 0 (never hit a milestone) ranking last among
    the tied; entries still tied after that share a rank.
    """
    if not entries:
        raise ComparisonError("nothing to rank")
    if len({e.eval_id for e in entries}) > 1:
        raise ComparisonError("score reports come from different evaluations")

    def key(e: ScoreReport):
        # Larger is better for both components.
        tb = -e.tie_break_episode if e.tie_break_episode > 0 else -np.inf
        return (e.mean, tb)

    keys = [key(e) for e in entries]
    return [1 + sum(other > mine for other in keys) for mine in keys]


# --- seed vaults ---------------------------------------------------------------


def write_vault(path, seeds) -> None:
    seeds = [int(s) & 0xFFFFFFFFFFFFFFFF for s in seeds]
    blob = _VAULT_HEADER.pack(VAULT_MAGIC, VAULT_VERSION, len(seeds))
    blob += b"".join(struct.pack("<Q", s) for s in seeds)
    Path(path).write_bytes(blob)


def read_vault(path) -> list[int]:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"seed vault not found: {path}")
    data = path.read_bytes()
    if len(data) < _VAULT_HEADER.size:
        raise CorruptLog("seed vault shorter than its header")
    magic, version, count = _VAULT_HEADER.unpack_from(data)
    if magic != VAULT_MAGIC:
        raise CorruptLog(f"bad vault magic {magic!r}")
    if version != VAULT_VERSION:
        raise IncompatibleVersion(f"vault version {version} unsupported")
    body = data[_VAULT_HEADER.size:]
    if len(body) != 8 * count:
        raise CorruptLog(f"vault claims {count} seeds but carries "
                         f"{len(body)} payload bytes")
    return [s for (s,) in struct.iter_unpack("<Q", body)]


# --- render variants -----------------------------------------------------------

VARIANT_NAMES = ("dev", "val", "eval")


@dataclass(frozen=True)
class VariantSet:
    """Three texture packs plus three disjoint seed vaults from one master
    seed; ``dev`` materials are shareable, the others stay hidden."""

    packs: dict = field(default_factory=dict)    # name -> TexturePack
    vaults: dict = field(default_factory=dict)   # name -> list[int]
    shareable: dict = field(default_factory=dict)  # name -> bool


def make_variant_set(master_seed: int,
                     episodes_per_vault: int = DEFAULT_EVAL_EPISODES
                     ) -> VariantSet:
    stream = SplitMix64(splitmix64(master_seed))
    packs = {name: make_texture_pack(stream.next_u64())
             for name in VARIANT_NAMES}
    seen: set[int] = set()
    seeds: list[int] = []
    while len(seeds) < 3 * episodes_per_vault:  # disjoint by construction
        s = stream.next_u64()
        if s not in seen:
            seen.add(s)
            seeds.append(s)
    vaults = {name: seeds[i * episodes_per_vault:(i + 1) * episodes_per_vault]
              for i, name in enumerate(VARIANT_NAMES)}
    return VariantSet(packs=packs, vaults=vaults,
                      shareable={"dev": True, "val": False, "eval": False})
