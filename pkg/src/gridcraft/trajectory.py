"""Event-sourced episode logs.

A log stores the episode seed plus one action byte per tick — nothing else.
Because the simulator is bit-deterministic, replaying the actions under the
same task definition regenerates every state, reward, and milestone, and
re-rendering under a different texture pack regenerates the frames a player
would have seen in that variant. Logs are therefore tiny, and annotations
(scores, milestones, death/no-op counts) are always derived, never stored
authority.

File format (little-endian throughout): magic ``MRLG``, u16 format_version,
u8 task code, u8 flags (bit 0 = truncated), u64 world_seed, u64 spec_digest,
u64 created_at (unix seconds), u8 player_kind, 16-byte pack_id (ASCII,
zero-padded), u64 action_count, then one byte per action.
"""
from __future__ import annotations

import struct
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CorruptLog, IncompatibleVersion
from .rng import actor_stream
from .tasks import (
    EpisodeState,
    Observation,
    TaskId,
    TaskSpec,
    advance,
    begin,
    make_task,
    observe,
    spec_digest,
)
from .world import Action, ItemId, N_ACTIONS, TexturePack, TickOutcome, WorldState

LOG_MAGIC = b"MRLG"
LOG_VERSION = 1
FLAG_TRUNCATED = 0x01

PLAYER_HUMAN, PLAYER_SCRIPTED, PLAYER_AGENT = 0, 1, 2
PLAYER_KIND_NAMES = {PLAYER_HUMAN: "human", PLAYER_SCRIPTED: "scripted",
                     PLAYER_AGENT: "agent"}

_HEADER = struct.Struct("<4sHBBQQQB16sQ")


@dataclass
class TrajectoryLog:
    task_id: TaskId
    world_seed: int
    spec_digest: int
    created_at: int
    player_kind: int
    pack_id: str
    actions: np.ndarray                  # uint8 action codes, one per tick
    truncated: bool = False
    format_version: int = LOG_VERSION

    def __post_init__(self) -> None:
        self.actions = np.asarray(self.actions, dtype=np.uint8)


@dataclass
class Annotation:
    """Everything derivable from one replay pass over a log."""

    total_score: float
    per_tick_rewards: list[tuple[int, float]]   # (tick, reward), nonzero only
    milestones: list[tuple[ItemId, int]]        # first acquisitions, in order
    deaths: int
    noop_count: int
    duration_ticks: int
    done_reason: str


# --- codec ------------------------------------------------------------------


def encode_log(log: TrajectoryLog) -> bytes:
    flags = FLAG_TRUNCATED if log.truncated else 0
    pack_bytes = log.pack_id.encode("ascii")
    if len(pack_bytes) > 16:
        raise ValueError(f"pack_id longer than 16 bytes: {log.pack_id!r}")
    header = _HEADER.pack(LOG_MAGIC, log.format_version, int(log.task_id), flags,
                          log.world_seed, log.spec_digest, log.created_at,
                          log.player_kind, pack_bytes, len(log.actions))
    return header + log.actions.tobytes()


def decode_log(data: bytes) -> TrajectoryLog:
    if len(data) < _HEADER.size:
        raise CorruptLog(f"log shorter than its header ({len(data)} bytes)")
    (magic, version, task_code, flags, seed, digest, created_at, player_kind,
     pack_bytes, count) = _HEADER.unpack_from(data)
    if magic != LOG_MAGIC:
        raise CorruptLog(f"bad magic {magic!r}")
    if version != LOG_VERSION:
        raise IncompatibleVersion(f"log format version {version} unsupported")
    if task_code not in TaskId._value2member_map_:
        raise CorruptLog(f"unknown task code {task_code}")
    if player_kind not in PLAYER_KIND_NAMES:
        raise CorruptLog(f"unknown player kind {player_kind}")
    body = data[_HEADER.size:]
    if len(body) != count:
        raise CorruptLog(f"action count {count} but {len(body)} bytes present")
    actions = np.frombuffer(body, dtype=np.uint8)
    if actions.size and int(actions.max()) >= N_ACTIONS:
        raise CorruptLog(f"action code {int(actions.max())} out of range")
    return TrajectoryLog(task_id=TaskId(task_code), world_seed=seed,
                         spec_digest=digest, created_at=created_at,
                         player_kind=player_kind,
                         pack_id=pack_bytes.rstrip(b"\x00").decode("ascii"),
                         actions=actions.copy(),
                         truncated=bool(flags & FLAG_TRUNCATED))


def write_log(path, log: TrajectoryLog) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_log(log))


def read_log(path) -> TrajectoryLog:
    with open(path, "rb") as fh:
        return decode_log(fh.read())


# --- recording ----------------------------------------------------------------


def record(spec: TaskSpec, seed: int, actor, pack: TexturePack | None = None,
           player_kind: int | None = None, created_at: int | None = None,
           explore: bool = False) -> TrajectoryLog:
    """Run one episode under ``actor`` and capture its actions.

    ``actor`` may be:
      * an object with ``act(observation, explore, rng)`` — observations are
        rendered each tick under ``pack``;
      * an object with ``act_privileged(episode, rng)`` — full-state access,
        no rendering (scripted demonstrators);
      * any iterable of action codes — consumed until it ends or the episode
        does; if it ends first the log is flagged truncated.

    An optional ``begin_episode(episode)`` hook on the actor is called once
    before the first action. The actor RNG stream is derived from the episode
    seed exactly as live evaluation derives it.
    """
    episode = begin(spec, seed, pack)
    rng = actor_stream(seed)
    actions: list[int] = []
    truncated = False

    hook = getattr(actor, "begin_episode", None)
    if hook is not None:
        hook(episode)

    if hasattr(actor, "act_privileged"):
        while not episode.done:
            a = int(actor.act_privileged(episode, rng))
            advance(episode, a)
            actions.append(a)
        inferred_kind = PLAYER_SCRIPTED
    elif hasattr(actor, "act"):
        obs = observe(episode)
        while not episode.done:
            a = int(actor.act(obs, explore, rng))
            advance(episode, a)
            actions.append(a)
            if not episode.done:
                obs = observe(episode)
        inferred_kind = PLAYER_AGENT
    else:
        stream: Iterator[int] = iter(actor)
        while not episode.done:
            try:
                a = int(next(stream))
            except StopIteration:
                truncated = True
                break
            advance(episode, a)
            actions.append(a)
        inferred_kind = PLAYER_HUMAN

    return TrajectoryLog(
        task_id=spec.task_id,
        world_seed=seed,
        spec_digest=spec_digest(spec),
        created_at=int(time.time()) if created_at is None else int(created_at),
        player_kind=inferred_kind if player_kind is None else int(player_kind),
        pack_id=episode.pack.pack_id,
        actions=np.array(actions, dtype=np.uint8),
        truncated=truncated,
    )


# --- replay family ------------------------------------------------------------


def _spec_for(log: TrajectoryLog, spec: TaskSpec | None) -> TaskSpec:
    resolved = make_task(log.task_id) if spec is None else spec
    digest = spec_digest(resolved)
    if digest != log.spec_digest:
        raise IncompatibleVersion(
            f"log was recorded under task digest {log.spec_digest:016x}, "
            f"replaying under {digest:016x}")
    return resolved


def _validate_actions(log: TrajectoryLog) -> None:
    if log.actions.size and int(log.actions.max()) >= N_ACTIONS:
        raise CorruptLog(f"action code {int(log.actions.max())} out of range")


def replay(log: TrajectoryLog, spec: TaskSpec | None = None
           ) -> Iterator[tuple[WorldState, int, float, TickOutcome]]:
    """Regenerate the episode tick by tick.

    Yields (post-step world, action, reward, outcome) per recorded action.
    Never renders. A log carrying more actions than the episode accepts
    (possible only for hand-crafted logs) stops cleanly at episode end.
    """
    resolved = _spec_for(log, spec)
    _validate_actions(log)
    episode = begin(resolved, log.world_seed)
    for a in log.actions.tolist():
        if episode.done:
            break
        reward, _, info = advance(episode, a)
        yield episode.world, a, reward, info["outcome"]


def replay_episode(log: TrajectoryLog, spec: TaskSpec | None = None
                   ) -> Iterator[tuple[EpisodeState, int, float, dict]]:
    """Like ``replay`` but yields the full episode wrapper and advance info
    (milestone bookkeeping included)."""
    resolved = _spec_for(log, spec)
    _validate_actions(log)
    episode = begin(resolved, log.world_seed)
    for a in log.actions.tolist():
        if episode.done:
            break
        reward, _, info = advance(episode, a)
        yield episode, a, reward, info


def rerender(log: TrajectoryLog, pack: TexturePack, spec: TaskSpec | None = None
             ) -> Iterator[tuple[Observation, int, float, bool]]:
    """Replay while rendering what the player saw under ``pack``.

    Yields (observation BEFORE the action, action, reward, done) per tick —
    the exact supervised/RL tuple order. Actions, rewards, and done flags are
    pack-independent; only the pov pixels change with ``pack``.
    """
    resolved = _spec_for(log, spec)
    _validate_actions(log)
    episode = begin(resolved, log.world_seed, pack)
    for a in log.actions.tolist():
        if episode.done:
            break
        obs = observe(episode)
        reward, done, _ = advance(episode, a)
        yield obs, a, reward, done


# Craft/place/smelt region of the action code space: these can silently do
# nothing, which annotation counts as no-ops alongside literal Noops.
_FIRST_NONMOTION_ACTION = int(Action.PlaceTable)


def annotate(log: TrajectoryLog, spec: TaskSpec | None = None) -> Annotation:
    """Derive scores, milestones, and quality counters in one replay pass."""
    total = 0.0
    sparse_rewards: list[tuple[int, float]] = []
    milestones: list[tuple[ItemId, int]] = []
    deaths = 0
    noops = 0
    duration = 0
    final_reason = "none"
    for episode, action, reward, info in replay_episode(log, spec):
        tick = info["tick"]
        duration = tick
        total += reward
        if reward != 0.0:
            sparse_rewards.append((tick, reward))
        for item in info["new_milestones"]:
            milestones.append((item, tick))
        outcome = info["outcome"]
        if outcome.died:
            deaths += 1
        if action == 0:
            noops += 1
        elif (action >= _FIRST_NONMOTION_ACTION and not outcome.acquired
              and outcome.cell_changed is None):
            noops += 1
        final_reason = episode.done_reason
    return Annotation(total_score=total, per_tick_rewards=sparse_rewards,
                      milestones=milestones, deaths=deaths, noop_count=noops,
                      duration_ticks=duration, done_reason=final_reason)
