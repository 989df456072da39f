"""Deterministic tile-world core: state, generation, dynamics, rendering."""
from .gen import GenConfig, generate_world, parse_config_text
from .hashing import canonical_state_bytes, state_hash
from .items import (
    Action,
    AnimalKind,
    CellType,
    FURNACE_RECIPE,
    Facing,
    ItemId,
    MINING,
    N_ACTIONS,
    N_ITEMS,
    RECIPES,
    Recipe,
    Station,
)
from .render import render_pov
from .state import AgentState, TickOutcome, WorldState
from .step import step
from .textures import TexturePack, export_atlas, make_texture_pack, pack_id_for_seed

__all__ = [
    "Action", "AgentState", "AnimalKind", "CellType", "FURNACE_RECIPE",
    "Facing", "GenConfig",
    "ItemId", "MINING", "N_ACTIONS", "N_ITEMS", "RECIPES", "Recipe", "Station",
    "TexturePack", "TickOutcome", "WorldState", "canonical_state_bytes",
    "export_atlas", "generate_world", "make_texture_pack", "pack_id_for_seed",
    "parse_config_text", "render_pov", "state_hash", "step",
]
