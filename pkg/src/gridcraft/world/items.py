"""Item, cell, action, and recipe tables for the crafting world.

All integer codes are stable serialization contracts: trajectory logs,
tuple files, and state hashes depend on them never changing.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class ItemId(IntEnum):
    Log = 0
    Planks = 1
    Stick = 2
    CraftingTable = 3
    WoodenPickaxe = 4
    Cobblestone = 5
    Furnace = 6
    StonePickaxe = 7
    IronOre = 8
    IronIngot = 9
    IronPickaxe = 10
    Diamond = 11
    IronAxe = 12
    RawMeatCow = 13
    RawMeatChicken = 14
    RawMeatSheep = 15
    RawMeatPig = 16
    CookedMeatCow = 17
    CookedMeatChicken = 18
    CookedMeatSheep = 19
    CookedMeatPig = 20


N_ITEMS = len(ItemId)


class CellType(IntEnum):
    Ground = 0
    Wall = 1
    Tree = 2
    Stone = 3
    IronOreBlock = 4
    DiamondOreBlock = 5
    Water = 6
    PlacedTable = 7
    PlacedFurnace = 8


N_CELL_TYPES = len(CellType)

# Cells an entity may stand on.
WALKABLE = frozenset({CellType.Ground, CellType.Water})


class Action(IntEnum):
    Noop = 0
    Forward = 1
    Backward = 2
    TurnLeft = 3
    TurnRight = 4
    Attack = 5
    PlaceTable = 6
    PlaceFurnace = 7
    CraftPlanks = 8
    CraftStick = 9
    CraftTable = 10
    CraftWoodenPickaxe = 11
    CraftStonePickaxe = 12
    CraftIronPickaxe = 13
    SmeltIronIngot = 14
    SmeltMeat = 15


N_ACTIONS = len(Action)


class Facing(IntEnum):
    North = 0
    East = 1
    South = 2
    West = 3


# (dx, dy) per facing; y grows downward (row index), x is the column index.
FACING_VECTORS = ((0, -1), (1, 0), (0, 1), (-1, 0))


class AnimalKind(IntEnum):
    Cow = 0
    Chicken = 1
    Sheep = 2
    Pig = 3


RAW_MEAT = {k: ItemId(ItemId.RawMeatCow + int(k)) for k in AnimalKind}
COOKED_MEAT = {k: ItemId(ItemId.CookedMeatCow + int(k)) for k in AnimalKind}


class Station(IntEnum):
    Nothing = 0
    Table = 1
    Furnace = 2


STATION_CELL = {Station.Table: CellType.PlacedTable, Station.Furnace: CellType.PlacedFurnace}


@dataclass(frozen=True)
class Recipe:
    output: ItemId
    output_count: int
    inputs: tuple[tuple[ItemId, int], ...]
    station: Station


RECIPES: dict[Action, Recipe] = {
    Action.CraftPlanks: Recipe(ItemId.Planks, 4, ((ItemId.Log, 1),), Station.Nothing),
    Action.CraftStick: Recipe(ItemId.Stick, 4, ((ItemId.Planks, 2),), Station.Nothing),
    Action.CraftTable: Recipe(ItemId.CraftingTable, 1, ((ItemId.Planks, 4),), Station.Nothing),
    Action.CraftWoodenPickaxe: Recipe(
        ItemId.WoodenPickaxe, 1, ((ItemId.Planks, 3), (ItemId.Stick, 2)), Station.Table
    ),
    Action.CraftStonePickaxe: Recipe(
        ItemId.StonePickaxe, 1, ((ItemId.Cobblestone, 3), (ItemId.Stick, 2)), Station.Table
    ),
    Action.CraftIronPickaxe: Recipe(
        ItemId.IronPickaxe, 1, ((ItemId.IronIngot, 3), (ItemId.Stick, 2)), Station.Table
    ),
    Action.SmeltIronIngot: Recipe(
        ItemId.IronIngot, 1, ((ItemId.IronOre, 1), (ItemId.Planks, 1)), Station.Furnace
    ),
}

# The furnace has no craft code of its own: PlaceFurnace crafts one when
# none is held, and places the held one otherwise.
FURNACE_RECIPE = Recipe(ItemId.Furnace, 1, ((ItemId.Cobblestone, 8),), Station.Table)

# SmeltMeat resolves to the first raw-meat kind (in ItemId code order) the
# agent holds, consuming one plank as fuel.
MEAT_RECIPES: tuple[Recipe, ...] = tuple(
    Recipe(COOKED_MEAT[k], 1, ((RAW_MEAT[k], 1), (ItemId.Planks, 1)), Station.Furnace)
    for k in AnimalKind
)

# Placement actions consume an inventory item and write a cell type.
PLACEMENTS: dict[Action, tuple[ItemId, CellType]] = {
    Action.PlaceTable: (ItemId.CraftingTable, CellType.PlacedTable),
    Action.PlaceFurnace: (ItemId.Furnace, CellType.PlacedFurnace),
}

# Pickaxe strength tiers; 0 means bare-handed.
PICKAXE_TIER = {ItemId.WoodenPickaxe: 1, ItemId.StonePickaxe: 2, ItemId.IronPickaxe: 3}


@dataclass(frozen=True)
class MiningRule:
    yields: ItemId
    hits: int
    min_pickaxe_tier: int  # 0 = no pickaxe needed


MINING: dict[CellType, MiningRule] = {
    CellType.Tree: MiningRule(ItemId.Log, 3, 0),  # 1 hit if an IronAxe is held
    CellType.Stone: MiningRule(ItemId.Cobblestone, 4, 1),
    CellType.IronOreBlock: MiningRule(ItemId.IronOre, 4, 2),
    CellType.DiamondOreBlock: MiningRule(ItemId.Diamond, 4, 3),
}


def best_pickaxe_tier(inventory) -> int:
    """Highest pickaxe tier present in an inventory count vector."""
    if inventory[ItemId.IronPickaxe] > 0:
        return 3
    if inventory[ItemId.StonePickaxe] > 0:
        return 2
    if inventory[ItemId.WoodenPickaxe] > 0:
        return 1
    return 0


def required_hits(cell: CellType, inventory) -> int | None:
    """Attack count needed to break ``cell``, or None if the held tools
    cannot make progress on it."""
    rule = MINING.get(cell)
    if rule is None:
        return None
    if cell == CellType.Tree:
        return 1 if inventory[ItemId.IronAxe] > 0 else rule.hits
    if best_pickaxe_tier(inventory) < rule.min_pickaxe_tier:
        return None
    return rule.hits
