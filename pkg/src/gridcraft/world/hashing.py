"""Canonical state serialization and hashing.

The canonical layout is little-endian throughout:

    u32 width, u32 height,
    grid cells row-major (u8 each),
    agent: u32 x, u32 y, u8 facing, 21 x u32 inventory counts (item-code
        order), u8 alive, u32 submerged_ticks,
    u32 animal count, then per animal sorted by (kind, x, y):
        u8 kind, u32 x, u32 y, u8 alive,
    u64 tick, u64 rng_state,
    u8 mining-progress flag, u32 x, u32 y, u32 hits_remaining (zeros when
        absent),
    u8 navigate-goal flag, u32 x, u32 y (zeros when absent).

Two equal states serialize identically, so their hashes match; any field
difference perturbs the FNV-1a 64 digest.
"""
from __future__ import annotations

import struct

from ..rng import fnv1a64
from .state import WorldState

_AGENT = struct.Struct("<IIB")
_AGENT_TAIL = struct.Struct("<BI")
_ANIMAL = struct.Struct("<BIIB")
_TICKS = struct.Struct("<QQ")
_OPT3 = struct.Struct("<BIII")
_OPT2 = struct.Struct("<BII")


def canonical_state_bytes(state: WorldState) -> bytes:
    h, w = state.grid.shape
    agent = state.agent
    parts = [
        struct.pack("<II", w, h),
        state.grid.tobytes(),
        _AGENT.pack(agent.x, agent.y, agent.facing),
        agent.inventory.astype("<u4").tobytes(),
        _AGENT_TAIL.pack(1 if agent.alive else 0, agent.submerged_ticks),
        struct.pack("<I", state.animals.shape[0]),
    ]
    rows = sorted(map(tuple, state.animals.tolist()))
    for kind, x, y, alive in rows:
        parts.append(_ANIMAL.pack(kind, x, y, alive))
    parts.append(_TICKS.pack(state.tick, state.rng_state))
    mp = state.mining_progress
    parts.append(_OPT3.pack(1, mp[0], mp[1], mp[2]) if mp is not None
                 else _OPT3.pack(0, 0, 0, 0))
    goal = state.navigate_goal
    parts.append(_OPT2.pack(1, goal[0], goal[1]) if goal is not None
                 else _OPT2.pack(0, 0, 0))
    return b"".join(parts)


def state_hash(state: WorldState) -> int:
    """FNV-1a 64 digest of the canonical serialization."""
    return fnv1a64(canonical_state_bytes(state))
