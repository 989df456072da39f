"""On-disk demonstration corpus.

Layout: one directory per trajectory under the corpus root,

    root/<id>/meta.json    — human-inspectable annotation snapshot
    root/<id>/log.mrlg     — the event-sourced action log
    root/<id>/tuples_<pack_id>.mrlt — optional rendered tuple cache

where ``id`` is the hex of spec_digest XOR world_seed XOR created_at. Logs
are the only authority; metadata and tuples are derived and regenerable.

The expert flag is corpus-relative (it compares a trajectory's duration to
1.5x the median duration of the corpus's scripted demonstrations), so read
paths recompute it against the current corpus rather than trusting the
stored snapshot; ``refresh_expert_flags`` rewrites the snapshots in place.

Tuple file format (little-endian): magic ``MRLT``, u16 version=1, u8 task
code, u16 inventory_len, u64 tick_count, then per tick: pov u8[12288]
(64x64x3 row-major RGB), inventory u16[inventory_len], compass f32,
action u8, reward f32, done u8.
"""
from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .errors import CorruptLog, IntegrityError, NoScheduleError
from .tasks import TaskId, TaskSpec, make_task, max_score
from .trajectory import Annotation, TrajectoryLog, read_log, rerender, write_log
from .world import TexturePack

logger = logging.getLogger(__name__)

TUPLE_MAGIC = b"MRLT"
TUPLE_VERSION = 1
POV_BYTES = 64 * 64 * 3

_TUPLE_HEADER = struct.Struct("<4sHBHQ")

EXPERT_DURATION_FACTOR = 1.5


@dataclass
class TrajectoryMeta:
    trajectory_id: str
    task_id: TaskId
    player_kind: int
    total_score: float
    duration_ticks: int
    deaths: int
    noop_count: int
    milestones: list[tuple[int, int]]   # (item code, tick)
    pack_id: str
    is_expert: bool

    def to_json(self) -> str:
        payload = {
            "trajectory_id": self.trajectory_id,
            "task_id": int(self.task_id),
            "player_kind": self.player_kind,
            "total_score": self.total_score,
            "duration_ticks": self.duration_ticks,
            "deaths": self.deaths,
            "noop_count": self.noop_count,
            "milestones": [[int(i), int(t)] for i, t in self.milestones],
            "pack_id": self.pack_id,
            "is_expert": self.is_expert,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TrajectoryMeta":
        raw = json.loads(text)
        return cls(
            trajectory_id=str(raw["trajectory_id"]),
            task_id=TaskId(int(raw["task_id"])),
            player_kind=int(raw["player_kind"]),
            total_score=float(raw["total_score"]),
            duration_ticks=int(raw["duration_ticks"]),
            deaths=int(raw["deaths"]),
            noop_count=int(raw["noop_count"]),
            milestones=[(int(i), int(t)) for i, t in raw["milestones"]],
            pack_id=str(raw["pack_id"]),
            is_expert=bool(raw["is_expert"]),
        )


@dataclass
class SampleBatch:
    """Parallel arrays of learning tuples (row i is one tick)."""

    pov: np.ndarray        # (n, 64, 64, 3) uint8
    inventory: np.ndarray  # (n, inventory_len) uint16
    compass: np.ndarray    # (n,) float32
    actions: np.ndarray    # (n,) uint8
    rewards: np.ndarray    # (n,) float32
    dones: np.ndarray      # (n,) uint8

    def __len__(self) -> int:
        return len(self.actions)


def trajectory_id_for(log: TrajectoryLog) -> str:
    digest = log.spec_digest ^ log.world_seed ^ log.created_at
    return f"{digest & 0xFFFFFFFFFFFFFFFF:016x}"


def tuple_dtype(inventory_len: int) -> np.dtype:
    return np.dtype([
        ("pov", np.uint8, (POV_BYTES,)),
        ("inventory", "<u2", (inventory_len,)),
        ("compass", "<f4"),
        ("action", "u1"),
        ("reward", "<f4"),
        ("done", "u1"),
    ])


# --- scoring / expert criteria ----------------------------------------------


def _score_criterion(meta: TrajectoryMeta) -> bool:
    try:
        return meta.total_score == max_score(make_task(meta.task_id))
    except NoScheduleError:
        return True  # unscoreable tasks gate on duration alone


def expert_threshold_of(metas: list[TrajectoryMeta]) -> float:
    """1.5x the median duration of the corpus's scripted demonstrations;
    infinite when the corpus holds no scripted logs (duration gate vacuous)."""
    from .trajectory import PLAYER_SCRIPTED

    scripted = [m.duration_ticks for m in metas if m.player_kind == PLAYER_SCRIPTED]
    if not scripted:
        return float("inf")
    return EXPERT_DURATION_FACTOR * float(np.median(scripted))


def is_expert_under(meta: TrajectoryMeta, threshold: float) -> bool:
    return meta.duration_ticks <= threshold and _score_criterion(meta)


# --- corpus I/O ---------------------------------------------------------------


def write_trajectory(root, log: TrajectoryLog, annotation: Annotation) -> str:
    """Persist one trajectory; returns its id.

    Idempotent for identical content; a different log under an existing id is
    an integrity error. The stored is_expert snapshot uses only the score
    criterion (the duration gate needs corpus context; see
    ``refresh_expert_flags``).
    """
    root = Path(root)
    tid = trajectory_id_for(log)
    entry = root / tid
    log_path = entry / "log.mrlg"
    from .trajectory import encode_log

    payload = encode_log(log)
    if log_path.exists():
        if log_path.read_bytes() == payload:
            return tid
        raise IntegrityError(f"trajectory {tid} already stored with different content")
    entry.mkdir(parents=True, exist_ok=True)
    meta = TrajectoryMeta(
        trajectory_id=tid,
        task_id=log.task_id,
        player_kind=log.player_kind,
        total_score=annotation.total_score,
        duration_ticks=annotation.duration_ticks,
        deaths=annotation.deaths,
        noop_count=annotation.noop_count,
        milestones=[(int(i), int(t)) for i, t in annotation.milestones],
        pack_id=log.pack_id,
        is_expert=False,
    )
    meta.is_expert = _score_criterion(meta)
    (entry / "meta.json").write_text(meta.to_json(), encoding="utf-8")
    log_path.write_bytes(payload)
    return tid


def read_meta(root, trajectory_id: str) -> TrajectoryMeta:
    path = Path(root) / trajectory_id / "meta.json"
    return TrajectoryMeta.from_json(path.read_text(encoding="utf-8"))


def read_trajectory(root, trajectory_id: str) -> TrajectoryLog:
    return read_log(Path(root) / trajectory_id / "log.mrlg")


def corpus_metas(root) -> dict[str, TrajectoryMeta]:
    """All readable metadata keyed by id; corrupt entries are skipped with a
    logged warning."""
    root = Path(root)
    metas: dict[str, TrajectoryMeta] = {}
    if not root.exists():
        return metas
    for entry in sorted(root.iterdir()):
        meta_path = entry / "meta.json"
        if not meta_path.is_file():
            continue
        try:
            metas[entry.name] = TrajectoryMeta.from_json(
                meta_path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
            logger.warning("skipping corrupt metadata %s: %s", meta_path, exc)
    return metas


def filter_corpus(root, predicate: Callable[[TrajectoryMeta], bool]) -> list[str]:
    """Ids whose metadata satisfies ``predicate``, sorted lexicographically.

    is_expert is recomputed against the current corpus before the predicate
    sees it, so the flag never goes stale as the corpus grows.
    """
    metas = corpus_metas(root)
    threshold = expert_threshold_of(list(metas.values()))
    selected = []
    for tid, meta in metas.items():
        meta.is_expert = is_expert_under(meta, threshold)
        if predicate(meta):
            selected.append(tid)
    return sorted(selected)


def refresh_expert_flags(root) -> float:
    """Rewrite every stored is_expert snapshot against the current corpus
    threshold; returns the threshold used."""
    metas = corpus_metas(root)
    threshold = expert_threshold_of(list(metas.values()))
    for tid, meta in metas.items():
        flag = is_expert_under(meta, threshold)
        if flag != meta.is_expert:
            meta.is_expert = flag
            (Path(root) / tid / "meta.json").write_text(meta.to_json(),
                                                        encoding="utf-8")
    return threshold


# --- tuple export / loading ---------------------------------------------------


def tuple_path(root, trajectory_id: str, pack: TexturePack) -> Path:
    return Path(root) / trajectory_id / f"tuples_{pack.pack_id}.mrlt"


def export_tuples(root, trajectory_id: str, pack: TexturePack,
                  spec: TaskSpec | None = None) -> Path:
    """Render the trajectory under ``pack`` and write its learning tuples.

    Deterministic, hence idempotent: re-exporting overwrites with identical
    bytes. Returns the tuple file path.
    """
    log = read_trajectory(root, trajectory_id)
    resolved = make_task(log.task_id) if spec is None else spec
    inv_len = len(resolved.observation.inventory_items)
    dtype = tuple_dtype(inv_len)

    rows = []
    for obs, action, reward, done in rerender(log, pack, resolved):
        row = np.zeros((), dtype=dtype)
        row["pov"] = obs.pov.reshape(-1)
        row["inventory"] = np.clip(obs.inventory, 0, 0xFFFF).astype(np.uint16)
        row["compass"] = np.float32(obs.compass_angle)
        row["action"] = action
        row["reward"] = np.float32(reward)
        row["done"] = 1 if done else 0
        rows.append(row)

    path = tuple_path(root, trajectory_id, pack)
    header = _TUPLE_HEADER.pack(TUPLE_MAGIC, TUPLE_VERSION, int(log.task_id),
                                inv_len, len(rows))
    with open(path, "wb") as fh:
        fh.write(header)
        if rows:
            fh.write(np.stack(rows).tobytes())
    return path


def read_tuples(path) -> tuple[TaskId, np.ndarray]:
    """Memory-map a tuple file; returns (task_id, structured row array)."""
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(_TUPLE_HEADER.size)
    if len(header) < _TUPLE_HEADER.size:
        raise CorruptLog(f"tuple file {path} shorter than its header")
    magic, version, task_code, inv_len, count = _TUPLE_HEADER.unpack(header)
    if magic != TUPLE_MAGIC:
        raise CorruptLog(f"bad tuple magic {magic!r} in {path}")
    if version != TUPLE_VERSION:
        from .errors import IncompatibleVersion

        raise IncompatibleVersion(f"tuple version {version} unsupported")
    dtype = tuple_dtype(inv_len)
    expected = _TUPLE_HEADER.size + count * dtype.itemsize
    if path.stat().st_size != expected:
        raise CorruptLog(f"tuple file {path} has wrong size "
                         f"({path.stat().st_size} != {expected})")
    rows = np.memmap(path, dtype=dtype, mode="r", offset=_TUPLE_HEADER.size,
                     shape=(count,))
    return TaskId(task_code), rows


def _batch_from_rows(rows: np.ndarray) -> SampleBatch:
    return SampleBatch(
        pov=np.ascontiguousarray(rows["pov"]).reshape(-1, 64, 64, 3),
        inventory=np.ascontiguousarray(rows["inventory"]),
        compass=np.ascontiguousarray(rows["compass"]),
        actions=np.ascontiguousarray(rows["action"]),
        rewards=np.ascontiguousarray(rows["reward"]),
        dones=np.ascontiguousarray(rows["done"]),
    )


def load_batches(root, trajectory_ids: list[str], pack: TexturePack,
                 batch_size: int, shuffle_seed: int,
                 spec: TaskSpec | None = None) -> Iterator[SampleBatch]:
    """Stream shuffled fixed-size batches across the listed trajectories.

    Missing tuple files are exported on demand. The global tuple permutation
    is pinned by ``shuffle_seed``; the final batch may be short.
    """
    if batch_size <= 0:
        raise ValueError("batch_size must be positive")
    tables = []
    for tid in trajectory_ids:
        path = tuple_path(root, tid, pack)
        if not path.exists():
            export_tuples(root, tid, pack, spec)
        _, rows = read_tuples(path)
        tables.append(rows)
    if not tables:
        return
    counts = np.array([len(t) for t in tables], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)])
    total = int(starts[-1])
    order = np.random.Generator(np.random.PCG64(shuffle_seed)).permutation(total)
    for at in range(0, total, batch_size):
        chunk = order[at:at + batch_size]
        table_idx = np.searchsorted(starts, chunk, side="right") - 1
        rows = np.stack([tables[t][g - starts[t]]
                         for t, g in zip(table_idx, chunk)])
        yield _batch_from_rows(rows)
