"""Live play server: one browser session per WebSocket, recorded into the
corpus exactly like scripted logs (only the stored player kind differs).

The server drives time: every tick interval it consumes the most recent
action the client sent (or Noop), advances the episode, appends the action
to the in-progress recording, and pushes an observation frame. The client
is a pure view — on disconnect the log so far is finalized with the
truncated flag, and a finished episode replays offline to exactly the
reward sequence that was shown live.
"""
from __future__ import annotations

import asyncio
import base64
import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .dataset import write_trajectory
from .rng import SplitMix64
from .tasks import (
    TASK_BY_NAME,
    EpisodeState,
    TaskSpec,
    advance,
    begin,
    make_task,
    observe,
    spec_digest,
)
from .trajectory import PLAYER_HUMAN, TrajectoryLog, annotate
from .world import N_ACTIONS, Action, TexturePack, make_texture_pack

POV_BYTES = 64 * 64 * 3


@dataclass
class SessionState:
    """One live episode and its in-progress recording."""

    session_id: str
    spec: TaskSpec
    episode: EpisodeState
    pack: TexturePack
    world_seed: int
    pending_action: int = int(Action.Noop)   # latest-wins between ticks
    actions: list[int] = field(default_factory=list)
    finalized: bool = False


# --- wire protocol ---------------------------------------------------------------


def parse_client_message(text: str) -> dict:
    """Decode one client frame; raises ValueError on anything malformed."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from None
    if not isinstance(msg, dict):
        raise ValueError("message must be a JSON object")
    kind = msg.get("type")
    if kind == "Act":
        code = msg.get("code")
        if not isinstance(code, int) or isinstance(code, bool) \
                or not 0 <= code < N_ACTIONS:
            raise ValueError(f"Act.code must be an integer in [0, {N_ACTIONS})")
        return {"type": "Act", "code": code}
    if kind == "Start":
        task = msg.get("task")
        if not isinstance(task, str):
            raise ValueError("Start.task must be a string")
        seed = msg.get("seed")
        if seed is not None and (not isinstance(seed, int)
                                 or isinstance(seed, bool) or seed < 0):
            raise ValueError("Start.seed must be a non-negative integer")
        return {"type": "Start", "task": task, "seed": seed}
    raise ValueError(f"unknown message type {kind!r}")


def _error(code: str, detail: str) -> dict:
    return {"type": "Error", "code": code, "detail": detail}


def _obs_message(session: SessionState, reward: float) -> dict:
    episode = session.episode
    obs = observe(episode)
    return {
        "type": "Obs",
        "tick": int(episode.world.tick),
        "pov_b64": base64.b64encode(obs.pov.tobytes()).decode("ascii"),
        "inventory": [int(n) for n in obs.inventory],
        "compass": float(obs.compass_angle),
        "reward": float(reward),
        "score": float(episode.cumulative_score),
        "done": bool(episode.done),
        "done_reason": episode.done_reason if episode.done else None,
    }


# --- session mechanics -----------------------------------------------------------


def open_session(task_name: str, seed: int | None, pack: TexturePack
                 ) -> SessionState:
    spec = make_task(TASK_BY_NAME[task_name])
    if seed is None:
        # Live sessions without a chosen seed get a clock-derived one.
        seed = SplitMix64(time.time_ns()).next_u64()
    episode = begin(spec, seed, pack)
    return SessionState(session_id=uuid.uuid4().hex, spec=spec,
                        episode=episode, pack=pack, world_seed=seed)


def tick_session(session: SessionState) -> dict:
    """Consume the pending action, advance one tick, emit the Obs frame."""
    action = session.pending_action
    session.pending_action = int(Action.Noop)
    reward, _, _ = advance(session.episode, action)
    session.actions.append(action)
    return _obs_message(session, reward)


def finalize_session(session: SessionState, corpus_root, truncated: bool) -> str:
    """Write the recording; human logs share the scripted-log codec."""
    session.finalized = True
    log = TrajectoryLog(
        task_id=session.spec.task_id,
        world_seed=session.world_seed,
        spec_digest=spec_digest(session.spec),
        created_at=int(time.time()),
        player_kind=PLAYER_HUMAN,
        pack_id=session.pack.pack_id,
        actions=np.array(session.actions, dtype=np.uint8),
        truncated=truncated,
    )
    return write_trajectory(corpus_root, log, annotate(log, session.spec))


# --- server ----------------------------------------------------------------------


async def _read_client(ws: WebSocket, session: SessionState) -> None:
    """Fold incoming frames into the session until the client goes away."""
    while True:
        try:
            raw = await ws.receive_text()
        except WebSocketDisconnect:
            return
        try:
            msg = parse_client_message(raw)
        except ValueError as exc:
            await ws.send_json(_error("bad_message", str(exc)))
            continue
        if msg["type"] == "Act":
            session.pending_action = msg["code"]
        else:
            await ws.send_json(_error("session_active",
                                      "an episode is already running"))


async def _await_start(ws: WebSocket, pack: TexturePack) -> SessionState:
    """Hold the connection until a valid Start arrives."""
    while True:
        raw = await ws.receive_text()
        try:
            msg = parse_client_message(raw)
        except ValueError as exc:
            await ws.send_json(_error("bad_message", str(exc)))
            continue
        if msg["type"] == "Act":
            await ws.send_json(_error("no_session",
                                      "send Start before any Act"))
            continue
        if msg["task"] not in TASK_BY_NAME:
            await ws.send_json(_error(
                "bad_task",
                f"unknown task {msg['task']!r}; "
                f"choose from {sorted(TASK_BY_NAME)}"))
            continue
        return open_session(msg["task"], msg["seed"], pack)


def build_app(corpus_root, tick_rate: float = 10.0,
              pack_seed: int = 0, frontend_dir=None) -> FastAPI:
    corpus_root = Path(corpus_root)
    pack = make_texture_pack(pack_seed)
    interval = 1.0 / float(tick_rate)
    app = FastAPI(title="gridcraft play gateway")

    @app.websocket("/play")
    async def play(ws: WebSocket) -> None:
        await ws.accept()
        session: SessionState | None = None
        try:
            session = await _await_start(ws, pack)
            await ws.send_json({
                "type": "Started",
                "session_id": session.session_id,
                "task": session.spec.name,
                "tick_rate": float(tick_rate),
            })
            reader = asyncio.create_task(_read_client(ws, session))
            try:
                while True:
                    await asyncio.sleep(interval)
                    if reader.done():   # client left between ticks
                        break
                    payload = tick_session(session)
                    if session.episode.done:
                        finalize_session(session, corpus_root, truncated=False)
                    await ws.send_text(json.dumps(payload))
                    if session.episode.done:
                        break
            finally:
                # Runs on natural end, client disconnect, and task
                # cancellation alike; finalizing is synchronous, so even a
                # cancelled handler still lands the log.
                reader.cancel()
                if not session.finalized:
                    finalize_session(session, corpus_root, truncated=True)
            try:
                await ws.close()
            except Exception:   # socket may already be gone
                pass
        except WebSocketDisconnect:
            pass   # left before Start: nothing recorded, nothing to write

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="client")
    else:
        @app.get("/")
        def index() -> HTMLResponse:
            return HTMLResponse(
                "<!doctype html><title>gridcraft</title>"
                "<p>The play client bundle is not built. Connect a WebSocket "
                "client to <code>/play</code> instead.</p>")

    return app
