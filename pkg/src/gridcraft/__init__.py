"""gridcraft: deterministic crafting worlds, demonstration tooling, and
budgeted learning baselines, desk-scale."""

__version__ = "0.1.0"
